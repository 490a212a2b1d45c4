"""End-to-end pipeline: pick a solution bound, solve the modified Dantzig game,
classify, recover solutions or certificates, and re-verify everything with
independent arithmetic.

Classification never guesses: a recovered point or direction is only reported
after the corresponding feasibility/certificate inequalities pass on their
own, otherwise the outcome is Inconclusive with diagnostics from both
branches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .bounds import ARBITRARY, SolutionBoundM, practical_bound_M
from .game import Strategy1, Strategy2, solve_game
from .model import (
    DualPoint,
    PrimalPoint,
    SdpPair,
    SymMat,
    frobenius_inner,
    is_psd,
    max_eigenvalue,
    residuals,
    verify_strongly_optimal,
)
from .solver import SolverOptions

STRONGLY_OPTIMAL = "StronglyOptimal"
PRIMAL_UNBOUNDED_CERT = "PrimalUnboundedCert"
DUAL_UNBOUNDED_CERT = "DualUnboundedCert"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PipelineConfig:
    solver_opts: SolverOptions = SolverOptions(tol=1e-10, max_iters=300)
    value_zero_threshold: Optional[float] = None
    bound_mode: Union[str, float] = "practical"
    verify_tol: float = 1e-6

    def __post_init__(self):
        if self.value_zero_threshold is not None and self.value_zero_threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.verify_tol <= 0:
            raise ValueError("verification tolerance must be positive")
        if isinstance(self.bound_mode, str):
            if self.bound_mode != "practical":
                raise ValueError("bound_mode is 'practical' or a fixed numeric value")
        elif not float(self.bound_mode) > 0:
            raise ValueError("a fixed solution bound must be positive")


@dataclass(eq=False)
class Outcome:
    kind: str
    game_value: float
    M_used: SolutionBoundM
    X_opt: Optional[SymMat] = None
    y_opt: Optional[np.ndarray] = None
    direction_X: Optional[SymMat] = None
    direction_y: Optional[np.ndarray] = None
    implied_w_bar: Optional[float] = None
    verification: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class CertificateFragment:
    """Candidate unbounded directions read off an optimal player-1 strategy."""

    primal_direction: Optional[SymMat] = None
    dual_direction: Optional[np.ndarray] = None

    @property
    def empty(self) -> bool:
        return self.primal_direction is None and self.dual_direction is None


def recover_optimal(s2: Strategy2, tol: float):
    """Scale the second player's optimal strategy back to a primal/dual pair."""
    if s2.t <= tol:
        raise ValueError("t vanished; bounded-case recovery impossible")
    X = SymMat.from_array(s2.X.array / s2.t, symmetrize=True)
    return X, s2.y / s2.t


def recover_certificate(s1: Strategy1, pair: SdpPair, tol: float) -> CertificateFragment:
    """Read candidate unbounded directions off an optimal player-1 strategy.

    <C, X'> < 0 makes X' a candidate unbounded direction of the primal
    (certifying dual infeasibility); b'y' > 0 makes y' a candidate for the
    dual (certifying primal infeasibility).  Both may hold; primal is listed
    first.  Expects t' to have vanished: a positive-value game with t' > tol
    signals numerical trouble or a failed constraint qualification.
    """
    if s1.t > tol:
        raise ValueError("t' nonzero in unbounded regime")
    scale = 1.0 + pair.max_abs_entry()
    primal = None
    dual = None
    if frobenius_inner(pair.C.to_float(), s1.X.to_float()) < -tol * scale:
        primal = s1.X
    if float(pair.b_array @ s1.y) > tol * scale:
        dual = np.array(s1.y)
    return CertificateFragment(primal_direction=primal, dual_direction=dual)


def aux_value_relation(v: float, M: float) -> float:
    """Auxiliary optimum implied by a positive game value: w = v(M+1)/(1-v)."""
    if not 0.0 <= v < 1.0:
        raise ValueError("the game value lies in [0, 1) in the unbounded regime")
    return v * (M + 1.0) / (1.0 - v)


def _check_primal_direction(pair: SdpPair, X: SymMat, tol: float) -> dict:
    """Independent certificate check: X psd, <A_i,X> >= -tol, <C,X> < -tol*scale."""
    scale = 1.0 + pair.max_abs_entry()
    Xf = X.to_float()
    worst_lin = min(frobenius_inner(Ai.to_float(), Xf) for Ai in pair.A)
    obj = frobenius_inner(pair.C.to_float(), Xf)
    ok = is_psd(Xf, tol) and worst_lin >= -tol * scale and obj < -tol * scale
    return {"ok": ok, "min_constraint_value": worst_lin, "objective_along_direction": obj}


def _check_dual_direction(pair: SdpPair, y: np.ndarray, tol: float) -> dict:
    """Independent certificate check: y >= 0, sum y_i A_i <= tol, b'y > tol*scale."""
    scale = 1.0 + pair.max_abs_entry()
    y_scale = 1.0 + float(np.max(np.abs(y))) if y.size else 1.0
    combo = sum(yi * Ai.array for yi, Ai in zip(y, pair.A))
    lam = max_eigenvalue(SymMat.from_array(combo, symmetrize=True))
    val = float(pair.b_array @ y)
    ok = float(np.min(y)) >= -tol * y_scale and lam <= tol * scale and val > tol * scale
    return {"ok": ok, "max_eig_combo": lam, "objective_along_direction": val}


def run_pipeline(pair: SdpPair, config: Optional[PipelineConfig] = None) -> Outcome:
    """Classify a pair through its modified Dantzig game.

    Zero game value: recover the strongly optimal pair from the second
    player's strategy and verify it.  Positive value: check the first player's
    strategy structure (t' = 0, u = v), recover an unbounded direction, and
    verify the certificate inequalities independently.  Any verification
    failure downgrades to Inconclusive with diagnostics.
    """
    config = config or PipelineConfig()
    pf = pair.to_float()
    if isinstance(config.bound_mode, str):
        M_used = practical_bound_M(pair)
    else:
        M_used = SolutionBoundM(mode=ARBITRARY, value=float(config.bound_mode))
    M = M_used.value
    game = solve_game(pf, M, config.solver_opts)
    v = game.value
    threshold = (
        config.value_zero_threshold
        if config.value_zero_threshold is not None
        else 0.5 / (M + 1.0)
    )
    tol = config.verify_tol
    diagnostics = {
        "game_residual": game.residual,
        "value_p1": game.value_p1,
        "value_p2": game.value_p2,
        "threshold": threshold,
        "s1_t": game.s1.t,
        "s1_u": game.s1.u,
        "s2_t": game.s2.t,
    }
    out = Outcome(kind=INCONCLUSIVE, game_value=v, M_used=M_used, diagnostics=diagnostics)

    if v <= threshold:
        try:
            X, y = recover_optimal(game.s2, tol=min(threshold, 1e-8))
        except ValueError as exc:
            out.notes.append(f"bounded-branch recovery failed: {exc}")
        else:
            report = residuals(pf, PrimalPoint(X), DualPoint(tuple(y)))
            out.verification = {
                "min_eig_slack": report.min_eig_slack,
                "worst_linear_violation": report.worst_linear_violation,
                "gap": report.gap,
            }
            if verify_strongly_optimal(pf, PrimalPoint(X), DualPoint(tuple(y)), tol):
                out.kind = STRONGLY_OPTIMAL
                out.X_opt = X
                out.y_opt = y
                return out
            out.notes.append("recovered pair failed independent optimality verification")
        robustly_positive = v > max(1e-6, 10.0 * game.residual)
        if not robustly_positive:
            return out
        # the bounded branch failed on a clearly positive value: fall through
        # to the unbounded analysis so both branches leave diagnostics

    # a positive game value rules out a strongly optimal pair
    out.notes.append("game value positive; no pair of strongly optimal solutions exists")
    out.implied_w_bar = aux_value_relation(min(v, 1.0 - 1e-12), M) if v < 1.0 else None
    structure_ok = abs(game.s1.u - v) <= tol and game.s1.t <= tol
    if not structure_ok:
        out.notes.append(
            "optimal strategy violates the unbounded-regime structure (t'=0, u=v); "
            "constraint qualification may fail"
        )
    try:
        frag = recover_certificate(game.s1, pf, tol)
    except ValueError as exc:
        out.notes.append(f"certificate recovery failed: {exc}")
        return out
    if frag.empty:
        out.notes.append("no certificate inequality is strictly satisfied")
        return out
    checks = dict(out.verification) if isinstance(out.verification, dict) else {}
    if frag.primal_direction is not None:
        checks["primal"] = _check_primal_direction(pf, frag.primal_direction, tol)
    if frag.dual_direction is not None:
        checks["dual"] = _check_dual_direction(pf, frag.dual_direction, tol)
    out.verification = checks
    primal_ok = checks.get("primal", {}).get("ok", False)
    dual_ok = checks.get("dual", {}).get("ok", False)
    if primal_ok:
        out.kind = PRIMAL_UNBOUNDED_CERT
        out.direction_X = frag.primal_direction
        if dual_ok:
            out.direction_y = frag.dual_direction
            out.notes.append("both certificate directions verified; primal listed first")
        return out
    if dual_ok:
        out.kind = DUAL_UNBOUNDED_CERT
        out.direction_y = frag.dual_direction
        return out
    out.notes.append("candidate directions failed independent verification")
    return out
