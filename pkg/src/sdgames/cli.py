"""Command-line interface.

Commands: reduce (game pipeline), bound (solution bounds), gen (instance
generators), verify (candidate checking), solve (direct primal/dual solves).

Exit codes for reduce: 0 strongly optimal, 2 unboundedness certificate,
3 inconclusive, 1 error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

import numpy as np

from .auxiliary import verify_strict_dual_unbounded, verify_strict_primal_unbounded
from .bounds import certified_bound_M, aux_dimensions, ceil_lg, eta_bar, input_bitsize, practical_bound_M
from .direct import solve_both
from .generators import example_corpus, khachiyan_pair, random_slater, random_unbounded
from .model import EXACT, DualPoint, PrimalPoint, SymMat, verify_strongly_optimal
from .probio import ProblemFormatError, load_problem, report_to_dict, save_problem
from .reduction import (
    DUAL_UNBOUNDED_CERT,
    INCONCLUSIVE,
    PRIMAL_UNBOUNDED_CERT,
    STRONGLY_OPTIMAL,
    PipelineConfig,
    run_pipeline,
)
from .solver import SolverOptions

_EXIT_BY_KIND = {
    STRONGLY_OPTIMAL: 0,
    PRIMAL_UNBOUNDED_CERT: 2,
    DUAL_UNBOUNDED_CERT: 2,
    INCONCLUSIVE: 3,
}


def _print_report_text(name: str, report: dict, stream=sys.stdout) -> None:
    M = report["M"]
    print(f"instance    : {name}", file=stream)
    print(f"outcome     : {report['outcome']}", file=stream)
    print(f"game value  : {report['game_value']:.9g}", file=stream)
    mval = "inf" if M["value"] is None else f"{M['value']:g}"
    print(f"M           : {mval} ({M['mode']})", file=stream)
    if M["certified_log2"] is not None:
        print(f"certified lg: {M['certified_log2']}", file=stream)
    if report.get("implied_w_bar") is not None:
        print(f"implied w   : {report['implied_w_bar']:.9g}", file=stream)
    for key in ("X", "y", "direction_X", "direction_y"):
        if report.get(key) is not None:
            print(f"{key:12s}: {report[key]}", file=stream)
    for note in report["notes"]:
        print(f"note        : {note}", file=stream)


def _reduce_one(path: Path, args) -> tuple:
    pair, metadata = load_problem(path)
    t0 = time.perf_counter()
    bound_mode = "practical" if args.M in (None, "auto") else float(args.M)
    cfg = PipelineConfig(
        solver_opts=SolverOptions(tol=args.tol, max_iters=400),
        bound_mode=bound_mode,
    )
    outcome = run_pipeline(pair, cfg)
    timings = {"total_s": time.perf_counter() - t0}
    report = report_to_dict(outcome, timings)
    if pair.mode == EXACT:
        report["M"]["certified_log2"] = str(certified_bound_M(pair).certified_log2)
    if metadata.get("expected_outcome"):
        report["expected_outcome"] = metadata["expected_outcome"]
    return outcome, report


def cmd_reduce(args) -> int:
    path = Path(args.input)
    paths = sorted(path.glob("*.json")) if path.is_dir() else [path]
    if not paths:
        print(f"no problem files under {path}", file=sys.stderr)
        return 1
    code = 0
    results = {}
    if len(paths) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
            futs = {p: pool.submit(_reduce_one, p, args) for p in paths}
        pairs = [(p, futs[p].result()) for p in paths]
    else:
        pairs = [(paths[0], _reduce_one(paths[0], args))]
    for p, (outcome, report) in pairs:
        results[p.name] = report
        if args.json:
            print(json.dumps({p.name: report} if len(paths) > 1 else report, indent=2))
        else:
            _print_report_text(p.name, report)
            if len(paths) > 1:
                print()
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / f"{p.stem}.report.json").write_text(json.dumps(report, indent=2) + "\n")
        code = max(code, _EXIT_BY_KIND[outcome.kind])
    return code


def cmd_bound(args) -> int:
    pair, _ = load_problem(Path(args.input))
    want_certified = args.certified
    want_practical = args.practical or not args.certified
    nbar, mbar, Nbar, pbar = aux_dimensions(pair.n, pair.m)
    print(f"n, m        : {pair.n}, {pair.m}")
    print(f"aux dims    : nbar={nbar} mbar={mbar} Nbar={Nbar} pbar={pbar}")
    if want_practical:
        M = practical_bound_M(pair)
        print(f"practical M : {M.value:g} ({M.mode})")
    if want_certified:
        if pair.mode != EXACT:
            print("certified bound needs exact rational/integer data", file=sys.stderr)
            return 1
        tau0 = input_bitsize(pair).tau0
        taubar1 = tau0 + Nbar + ceil_lg(pbar)
        eb = eta_bar(pair.n, pair.m, tau0)
        M = certified_bound_M(pair)
        print(f"tau0        : {tau0}")
        print(f"taubar1     : {taubar1}")
        print(f"etabar1     : {eb}")
        print(f"certified lg M: {M.certified_log2}")
    return 0


def cmd_gen(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.kind == "khachiyan":
        pair = khachiyan_pair(args.n, args.tau)
        p = out_dir / f"khachiyan_n{args.n}_tau{args.tau}.json"
        save_problem(p, pair)
        written.append(p)
    elif args.kind == "random-slater":
        pair = random_slater(args.n, args.m, args.seed)
        p = out_dir / f"random_slater_n{args.n}_m{args.m}_s{args.seed}.json"
        save_problem(p, pair, {"expected_outcome": "StronglyOptimal"})
        written.append(p)
    elif args.kind == "random-unbounded":
        pair = random_unbounded(args.n, args.m, args.seed)
        p = out_dir / f"random_unbounded_n{args.n}_m{args.m}_s{args.seed}.json"
        save_problem(p, pair, {"expected_outcome": "PrimalUnboundedCert"})
        written.append(p)
    elif args.kind == "example-corpus":
        for pair, meta in example_corpus():
            p = out_dir / f"{pair.name}.json"
            save_problem(p, pair, meta)
            written.append(p)
    else:
        print(f"unknown generator kind {args.kind!r}", file=sys.stderr)
        return 1
    for p in written:
        print(p)
    return 0


def cmd_verify(args) -> int:
    pair, _ = load_problem(Path(args.input))
    try:
        cand = json.loads(Path(args.candidate).read_text())
    except json.JSONDecodeError as exc:
        print(f"candidate parse error: {exc}", file=sys.stderr)
        return 1
    tol = args.tol
    try:
        if args.kind == "optimal":
            X = SymMat([[float(v) for v in row] for row in cand["X"]])
            y = DualPoint(tuple(float(v) for v in np.atleast_1d(cand["y"])))
            ok = verify_strongly_optimal(pair.to_float(), PrimalPoint(X), y, tol)
        elif args.kind == "primal-dir":
            W = SymMat([[float(v) for v in row] for row in cand["W"]])
            ok = verify_strict_primal_unbounded(pair.to_float(), W, tol)
        elif args.kind == "dual-dir":
            y = [float(v) for v in np.atleast_1d(cand["y"])]
            ok = verify_strict_dual_unbounded(pair.to_float(), y, tol)
        else:
            print(f"unknown kind {args.kind!r}", file=sys.stderr)
            return 1
    except (KeyError, ValueError, TypeError) as exc:
        print(f"candidate shape mismatch: {exc}", file=sys.stderr)
        return 1
    print("PASS" if ok else "FAIL")
    return 0 if ok else 2


def cmd_solve(args) -> int:
    pair, _ = load_problem(Path(args.input))
    res = solve_both(pair, SolverOptions(tol=args.tol, max_iters=500))
    doc = {
        "primal_status": res["primal_status"],
        "primal_value": None if not np.isfinite(res["primal_value"]) else res["primal_value"],
        "dual_status": res["dual_status"],
        "dual_value": res["dual_value"],
    }
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"primal: {doc['primal_status']}  value={doc['primal_value']}")
        print(f"dual  : {doc['dual_status']}  value={doc['dual_value']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdgames", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="run the game reduction pipeline")
    p.add_argument("input", help="problem file or directory of problem files")
    p.add_argument("--M", default="auto", help="solution bound: 'auto' or a number")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--json", action="store_true")
    p.add_argument("--text", action="store_true")
    p.add_argument("--out", default=None, help="directory for report files")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bound", help="compute solution bounds")
    p.add_argument("input")
    p.add_argument("--certified", action="store_true")
    p.add_argument("--practical", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("gen", help="generate problem files")
    p.add_argument("kind", choices=["khachiyan", "random-slater", "random-unbounded", "example-corpus"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="verify a candidate solution or direction")
    p.add_argument("input")
    p.add_argument("candidate")
    p.add_argument("--kind", choices=["optimal", "primal-dir", "dual-dir"], required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="solve the primal and dual directly")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"problem format error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
