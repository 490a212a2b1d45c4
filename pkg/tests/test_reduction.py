"""Pipeline classification, recovery operations, and the equivalence
properties on random instance families."""

from __future__ import annotations

import numpy as np
import pytest

from sdgames.auxiliary import ATTAINED, solve_aux, verify_strict_primal_unbounded
from sdgames.bounds import practical_bound_M
from sdgames.game import Strategy1, Strategy2, solve_game
from sdgames.generators import random_diagonal, random_slater, random_unbounded
from sdgames.model import (
    DualPoint,
    PrimalPoint,
    SymMat,
    frobenius_inner,
    verify_strongly_optimal,
)
from sdgames.reduction import (
    DUAL_UNBOUNDED_CERT,
    INCONCLUSIVE,
    PRIMAL_UNBOUNDED_CERT,
    STRONGLY_OPTIMAL,
    PipelineConfig,
    aux_value_relation,
    recover_certificate,
    recover_optimal,
    run_pipeline,
)

from lp_oracle import OPTIMAL as LP_OPTIMAL
from lp_oracle import UNBOUNDED as LP_UNBOUNDED
from lp_oracle import lp_min_inequality


def s2_of(X, y, t):
    return Strategy2(SymMat.from_array(np.asarray(X, float)), np.atleast_1d(y), t)


def s1_of(X, y, t, u):
    return Strategy1(SymMat.from_array(np.asarray(X, float)), np.atleast_1d(y), t, u)


class TestRecoverOptimal:
    def test_bounded_strategy(self):
        s2 = s2_of(np.array([[1.0, 0.0], [0.0, 0.0]]) / 3.0, [1.0 / 3.0], 1.0 / 3.0)
        X, y = recover_optimal(s2, 1e-8)
        assert np.allclose(X.array, [[1.0, 0.0], [0.0, 0.0]], atol=1e-12)
        assert y[0] == pytest.approx(1.0, abs=1e-12)

    def test_vanished_t_errors(self):
        s2 = s2_of(np.diag([0.5, 0.5]), [0.0], 0.0)
        with pytest.raises(ValueError, match="t vanished"):
            recover_optimal(s2, 1e-8)

    def test_scaling_consistency(self):
        base = np.array([[2.0, 0.5], [0.5, 1.0]])
        for lam in (0.5, 2.0):
            total = np.trace(lam * base) + lam * 0.7 + lam * 0.3
            s2 = s2_of(lam * base / total, [lam * 0.7 / total], lam * 0.3 / total)
            X, y = recover_optimal(s2, 1e-10)
            assert np.allclose(X.array, base / 0.3, atol=1e-10)
            assert y[0] == pytest.approx(0.7 / 0.3, abs=1e-10)


class TestRecoverCertificate:
    def test_unbounded_example_primal_direction(self, unbounded_pair):
        W = np.array([[1.0, 1.5], [1.5, 5.0]])
        total = np.trace(W) + 0.4
        s1 = s1_of(W / total, [0.0], 0.0, 0.4 / total)
        frag = recover_certificate(s1, unbounded_pair.to_float(), 1e-6)
        assert frag.primal_direction is not None
        assert frag.dual_direction is None

    def test_both_infeasible_dual_direction(self, both_infeasible_pair):
        s1 = s1_of(np.zeros((2, 2)), [2.0 / 3.0], 0.0, 1.0 / 3.0)
        frag = recover_certificate(s1, both_infeasible_pair.to_float(), 1e-6)
        assert frag.dual_direction is not None
        assert frag.dual_direction[0] == pytest.approx(2.0 / 3.0)
        assert frag.primal_direction is None

    def test_pure_u_yields_nothing(self, bounded_pair):
        s1 = s1_of(np.zeros((2, 2)), [0.0], 0.0, 1.0)
        frag = recover_certificate(s1, bounded_pair.to_float(), 1e-6)
        assert frag.empty

    def test_nonzero_t_errors(self, bounded_pair):
        s1 = s1_of(np.zeros((2, 2)), [0.5], 0.5, 0.0)
        with pytest.raises(ValueError, match="t' nonzero"):
            recover_certificate(s1, bounded_pair.to_float(), 1e-6)


class TestAuxValueRelation:
    def test_zero(self):
        assert aux_value_relation(0.0, 5.0) == 0.0

    def test_both_infeasible_value(self):
        assert aux_value_relation(1.0 / 3.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_invert_on_unbounded_example(self, unbounded_pair, game_opts):
        # aux optimum 1 at M = 1 forces game value 1/3
        aux = solve_aux(unbounded_pair)
        g = solve_game(unbounded_pair, 1.0, game_opts)
        assert aux_value_relation(g.value, 1.0) == pytest.approx(aux.w, abs=1e-5)

    def test_rejects_value_at_least_one(self):
        with pytest.raises(ValueError):
            aux_value_relation(1.0, 1.0)


class TestPipelineCorpus:
    def test_bounded(self, bounded_pair):
        out = run_pipeline(bounded_pair, PipelineConfig(bound_mode=3.0))
        assert out.kind == STRONGLY_OPTIMAL
        assert abs(out.game_value) <= 1e-6
        assert np.allclose(out.X_opt.array, [[1.0, 0.0], [0.0, 0.0]], atol=1e-4)
        assert out.y_opt[0] == pytest.approx(1.0, abs=1e-4)

    def test_unbounded(self, unbounded_pair):
        out = run_pipeline(unbounded_pair, PipelineConfig(bound_mode=1.0))
        assert out.kind == PRIMAL_UNBOUNDED_CERT
        assert out.game_value == pytest.approx(1.0 / 3.0, abs=1e-5)
        assert verify_strict_primal_unbounded(unbounded_pair, out.direction_X, 1e-6)

    def test_duality_gap_inconclusive(self, duality_gap_pair):
        out = run_pipeline(duality_gap_pair, PipelineConfig(bound_mode=1.0))
        assert out.kind == INCONCLUSIVE
        assert out.game_value > 1e-3
        assert any("no pair of strongly optimal solutions" in s for s in out.notes)

    def test_unattained_inconclusive(self, unattained_pair):
        out = run_pipeline(unattained_pair)
        assert out.kind == INCONCLUSIVE
        assert any("constraint qualification" in s for s in out.notes)


class TestEquivalenceProperties:
    def test_bounded_case_forward_and_converse(self):
        for seed in range(10):
            pair = random_slater(2 + seed % 3, 1 + seed % 3, 100 + seed)
            out = run_pipeline(pair)
            assert out.kind == STRONGLY_OPTIMAL, f"seed {seed}: {out.notes}"
            assert abs(out.game_value) <= 1e-6
            assert verify_strongly_optimal(
                pair.to_float(), PrimalPoint(out.X_opt), DualPoint(tuple(out.y_opt)), 1e-6
            )

    def test_bounded_case_t_lower_bound(self):
        for seed in range(5):
            pair = random_slater(2, 2, 200 + seed)
            M = practical_bound_M(pair).value
            g = solve_game(pair, M)
            assert g.s2.t >= 1.0 / (M + 1.0) - 1e-6

    def test_unbounded_case_structure(self):
        for seed in range(10):
            pair = random_unbounded(2 + seed % 3, 1 + seed % 2, 300 + seed)
            M = practical_bound_M(pair).value
            g = solve_game(pair, M)
            assert g.value > 1e-6, f"seed {seed}"
            assert abs(g.s1.u - g.value) <= 1e-6
            assert abs(g.s1.t) <= 1e-6
            out = run_pipeline(pair)
            assert out.kind in (PRIMAL_UNBOUNDED_CERT, DUAL_UNBOUNDED_CERT), f"seed {seed}"

    def test_value_trace_relation_unbounded_branch(self):
        for seed in range(5):
            pair = random_unbounded(2, 2, 400 + seed)
            M = practical_bound_M(pair).value
            g = solve_game(pair, M)
            assert g.value == pytest.approx(1.0 - (1.0 + M) * g.s2.t, abs=1e-6)

    def test_aux_relation_on_attained_unbounded(self):
        for seed in range(5):
            pair = random_unbounded(2, 1, 500 + seed)
            aux = solve_aux(pair)
            assert aux.attained_flag == ATTAINED
            M = practical_bound_M(pair).value
            g = solve_game(pair, M)
            implied = aux_value_relation(g.value, M)
            assert abs(aux.w - implied) <= 1e-5 * (1.0 + abs(aux.w))

    def test_lp_oracle_equivalence_diagonal(self):
        matched = 0
        for seed in range(10):
            kind = "slater" if seed % 2 == 0 else "unbounded"
            pair = random_diagonal(3, 2, 600 + seed, kind=kind)
            A_lp = np.array([np.diag(Ai.array) for Ai in pair.A])
            c_lp = np.diag(pair.C.array)
            status, val = lp_min_inequality(c_lp, A_lp, pair.b_array)
            out = run_pipeline(pair)
            if status == LP_OPTIMAL:
                assert out.kind == STRONGLY_OPTIMAL, f"seed {seed}: {out.notes}"
                got = frobenius_inner(pair.C.to_float(), out.X_opt)
                assert got == pytest.approx(val, abs=1e-6 * (1 + abs(val)))
            elif status == LP_UNBOUNDED:
                assert out.kind == PRIMAL_UNBOUNDED_CERT, f"seed {seed}: {out.notes}"
            matched += 1
        assert matched == 10
