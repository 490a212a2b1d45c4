"""Interior-point solver: correctness on small problems, LP reduction against a
vertex-enumeration oracle, duality and structural invariants."""

from __future__ import annotations

import numpy as np
import pytest

from sdgames.blocks import (
    BlockStructure,
    bv_inner,
    diag_block,
    free_scalar,
    matrix_block,
    svec,
)
from sdgames.solver import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    SolverOptions,
    StandardSdp,
    solve,
    solve_with_certificate,
)

from lp_oracle import OPTIMAL as LP_OPTIMAL
from lp_oracle import lp_min_standard


def _scalar_lp(c, a, rhs, sense="min"):
    st = BlockStructure([diag_block(1)])
    return StandardSdp(st, [np.array([c])], [([np.array([a])], rhs)], sense=sense)


def _random_feasible_block_sdp(rng, n=3, d=2, m=4):
    """Strictly feasible primal/dual data built around interior points."""
    st = BlockStructure([matrix_block(n), diag_block(d)])
    G = rng.normal(size=(n, n))
    X0 = G @ G.T + 0.5 * np.eye(n)
    x0d = rng.uniform(0.5, 1.5, size=d)
    rows = []
    for _ in range(m):
        Ak = rng.normal(size=(n, n))
        Ak = 0.5 * (Ak + Ak.T)
        ak = rng.normal(size=d)
        rows.append(([Ak, ak], float(np.tensordot(Ak, X0, 2) + ak @ x0d)))
    y0 = rng.normal(size=m)
    H = rng.normal(size=(n, n))
    S0 = H @ H.T + 0.5 * np.eye(n)
    s0d = rng.uniform(0.5, 1.5, size=d)
    Cm = sum(y0[k] * rows[k][0][0] for k in range(m)) + S0
    cd = sum(y0[k] * rows[k][0][1] for k in range(m)) + s0d
    return StandardSdp(st, [Cm, cd], rows)


def _dual_formulation(problem: StandardSdp) -> StandardSdp:
    """min -beta'y s.t. sum_k y_k a_k + z = c, z in the cone, y free."""
    st_p = problem.structure
    blocks = [free_scalar() for _ in problem.constraints] + list(st_p)
    st = BlockStructure(blocks)
    p = len(problem.constraints)
    cons = []
    c_vec = svec(st_p, list(problem.objective))
    row_vecs = [svec(st_p, list(a)) for a, _ in problem.constraints]
    dim = c_vec.size
    # one scalar equation per svec coordinate of the slack
    basis = []
    offset = 0
    for b in st_p:
        if b.kind == "matrix":
            k = b.size
            iu = np.triu_indices(k)
            for t in range(len(iu[0])):
                basis.append((offset + t,))
            offset += len(iu[0])
        else:
            for t in range(b.size):
                basis.append((offset + t,))
            offset += b.size
    for coord in range(dim):
        row = [np.zeros(1) for _ in range(p)]
        for k in range(p):
            row[k][0] = row_vecs[k][coord]
        # slack coefficient: unit svec coordinate mapped back to block entries
        unit = np.zeros(dim)
        unit[coord] = 1.0
        slack_blocks = []
        off = 0
        for b in st_p:
            if b.kind == "matrix":
                k = b.size
                iu = np.triu_indices(k)
                Mkk = np.zeros((k, k))
                seg = unit[off : off + len(iu[0])]
                for t, (i, j) in enumerate(zip(*iu)):
                    if seg[t]:
                        w = 1.0 if i == j else 1.0 / np.sqrt(2.0)
                        Mkk[i, j] = seg[t] * w
                        Mkk[j, i] = seg[t] * w
                slack_blocks.append(Mkk)
                off += len(iu[0])
            else:
                slack_blocks.append(unit[off : off + b.size].copy())
                off += b.size
        cons.append((row + slack_blocks, float(c_vec[coord])))
    obj = [np.zeros(1) for _ in range(p)] + list(BlockStructure(list(st_p)).zeros())
    for k in range(p):
        obj[k][0] = -problem.constraints[k][1]
    return StandardSdp(st, obj, cons, sense="min")


class TestBlockStructure:
    def test_scalar_dimension_bookkeeping(self):
        st = BlockStructure([matrix_block(3), diag_block(4), free_scalar(), free_scalar()])
        assert st.scalar_dim == 3 * 4 // 2 + 4 + 2
        assert st.cone_dim == 3 + 4
        assert svec(st, st.identity()).size == st.scalar_dim

    def test_matrix_block_needs_order_two(self):
        with pytest.raises(ValueError):
            matrix_block(1)


class TestExamples:
    def test_scalar_equality(self):
        r = solve(_scalar_lp(1.0, 1.0, 1.0))
        assert r.status == OPTIMAL
        assert r.value == pytest.approx(1.0, abs=1e-8)
        assert abs(r.gap) <= 1e-8

    def test_rank_one_minimizer(self):
        st = BlockStructure([matrix_block(2)])
        E11 = np.zeros((2, 2))
        E11[0, 0] = 1.0
        prob = StandardSdp(st, [np.eye(2)], [([E11], 1.0)])
        r = solve(prob)
        assert r.status == OPTIMAL
        assert r.value == pytest.approx(1.0, abs=1e-7)
        assert np.allclose(r.primal[0], E11, atol=1e-6)

    def test_khachiyan_2_2_value(self):
        from sdgames.bounds import khachiyan_instance

        prob, opt = khachiyan_instance(2, 2)
        r = solve(prob, SolverOptions(tol=1e-12, max_iters=400))
        assert r.value == pytest.approx(float(opt), rel=1e-3)

    def test_gap_consistency(self):
        r = solve(_scalar_lp(1.0, 1.0, 1.0))
        assert r.gap == pytest.approx(r.primal_objective - r.dual_objective, abs=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        prob = _random_feasible_block_sdp(rng)
        r1 = solve(prob)
        r2 = solve(prob)
        assert r1.value == r2.value
        assert r1.iterations == r2.iterations


class TestCertificates:
    def test_infeasible_scalar(self):
        r = solve_with_certificate(_scalar_lp(0.0, 1.0, -1.0))
        assert r.status == PRIMAL_INFEASIBLE
        # the Farkas ray certifies: beta'y > 0 with -a'y in the cone dual
        y = float(np.atleast_1d(r.dual)[0])
        assert -1.0 * y > 0

    def test_infeasible_dual_program_of_both_infeasible_pair(self, both_infeasible_pair):
        from sdgames.direct import dual_sdp

        r = solve_with_certificate(dual_sdp(both_infeasible_pair.to_float()))
        assert r.status != OPTIMAL

    def test_feasible_problem_matches_solve(self):
        rng = np.random.default_rng(8)
        prob = _random_feasible_block_sdp(rng)
        r1 = solve(prob)
        r2 = solve_with_certificate(prob)
        assert r1.status == r2.status == OPTIMAL
        assert r1.value == r2.value

    def test_unbounded_detection(self):
        # min -x s.t. 0*x = 0, x >= 0 is unbounded below
        st = BlockStructure([diag_block(1)])
        prob = StandardSdp(st, [np.array([-1.0])], [([np.array([0.0])], 0.0)])
        r = solve(prob)
        assert r.status == DUAL_INFEASIBLE


class TestPresolve:
    def test_dependent_rows_removed_with_warning(self):
        st = BlockStructure([diag_block(2)])
        rows = [
            ([np.array([1.0, 1.0])], 2.0),
            ([np.array([2.0, 2.0])], 4.0),
            ([np.array([1.0, -1.0])], 0.0),
        ]
        prob = StandardSdp(st, [np.array([1.0, 1.0])], rows)
        r = solve(prob)
        assert r.status == OPTIMAL
        assert any("dependent" in w for w in r.warnings)
        assert r.dual.shape == (3,)

    def test_inconsistent_duplicate_is_infeasible(self):
        st = BlockStructure([diag_block(1)])
        rows = [
            ([np.array([1.0])], 1.0),
            ([np.array([1.0])], 2.0),
        ]
        prob = StandardSdp(st, [np.array([1.0])], rows)
        r = solve(prob)
        assert r.status == PRIMAL_INFEASIBLE


class TestInvariants:
    def test_weak_duality_in_debug_mode(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            prob = _random_feasible_block_sdp(rng)
            r = solve(prob, SolverOptions(debug=True))
            assert r.status == OPTIMAL

    def test_block_permutation_equivariance(self):
        rng = np.random.default_rng(29)
        prob = _random_feasible_block_sdp(rng)
        perm = [1, 0]
        st = BlockStructure([list(prob.structure)[i] for i in perm])
        obj = [prob.objective[i] for i in perm]
        cons = [([a[i] for i in perm], rhs) for a, rhs in prob.constraints]
        permuted = StandardSdp(st, obj, cons)
        r1 = solve(prob)
        r2 = solve(permuted)
        assert r1.value == pytest.approx(r2.value, abs=1e-10)
        for i, j in enumerate(perm):
            assert np.allclose(r1.primal[j], r2.primal[i], atol=1e-10)

    def test_diagonal_blocks_reproduce_lp(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
            if m >= n:
                m = n - 1
            A = rng.normal(size=(m, n))
            x0 = rng.uniform(0.5, 1.5, size=n)
            b = A @ x0
            lam = rng.normal(size=m)
            c = A.T @ lam + rng.uniform(0.2, 1.0, size=n)
            st = BlockStructure([diag_block(n)])
            prob = StandardSdp(st, [c], [([A[k]], float(b[k])) for k in range(m)])
            r = solve(prob)
            status, val = lp_min_standard(c, A, b)
            assert status == LP_OPTIMAL
            assert r.status == OPTIMAL
            assert r.value == pytest.approx(val, abs=1e-6 * (1 + abs(val)))

    def test_self_duality(self):
        rng = np.random.default_rng(53)
        for _ in range(5):
            prob = _random_feasible_block_sdp(rng, n=2, d=2, m=3)
            r1 = solve(prob)
            r2 = solve(_dual_formulation(prob))
            assert r1.status == OPTIMAL and r2.status == OPTIMAL
            assert r2.value == pytest.approx(-r1.value, abs=1e-6 * (1 + abs(r1.value)))

    def test_initial_centrality_scales_start_only(self):
        rng = np.random.default_rng(71)
        prob = _random_feasible_block_sdp(rng)
        r1 = solve(prob, SolverOptions())
        r2 = solve(prob, SolverOptions(initial_centrality=5.0))
        assert r1.status == r2.status == OPTIMAL
        assert r1.value == pytest.approx(r2.value, abs=1e-7)

    def test_reported_solution_feasibility(self):
        rng = np.random.default_rng(61)
        prob = _random_feasible_block_sdp(rng)
        r = solve(prob)
        for (a, rhs) in prob.constraints:
            assert bv_inner(list(a), r.primal) == pytest.approx(rhs, abs=1e-7 * (1 + abs(rhs)))
        assert np.linalg.eigvalsh(r.primal[0])[0] >= -1e-9
        assert np.min(r.primal[1]) >= -1e-9
