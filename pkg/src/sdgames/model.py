"""Symmetric matrices, SDP pairs in primal/dual normal form, and feasibility predicates.

The primal program is  min <C, X>  s.t.  <A_i, X> >= b_i,  X psd;
its dual is            max b'y     s.t.  sum_i y_i A_i <= C (Loewner),  y >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import numpy as np

EXACT = "exact"
FLOAT = "float"


def _is_exact_scalar(v) -> bool:
    return isinstance(v, (int, Fraction)) or (
        isinstance(v, np.integer)
    )


class SymMat:
    """Dense symmetric real matrix.

    Carries either exact rational entries (``Fraction``/``int``) or binary64
    floats; the mode is fixed per instance and conversion to float is an
    explicit, one-way step (:meth:`to_float`).
    """

    __slots__ = ("dim", "_rows", "_arr", "mode")

    def __init__(self, entries):
        if isinstance(entries, SymMat):
            entries = entries._rows if entries.mode == EXACT else entries._arr
        if isinstance(entries, np.ndarray) and entries.dtype != object:
            arr = np.array(entries, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"expected a square matrix, got shape {arr.shape}")
            if arr.shape[0] < 1:
                raise ValueError("dimension must be at least 1")
            if not np.array_equal(arr, arr.T):
                raise ValueError("matrix is not symmetric")
            arr.flags.writeable = False
            self.dim = int(arr.shape[0])
            self._arr = arr
            self._rows = None
            self.mode = FLOAT
            return
        rows = [list(r) for r in entries]
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("expected a square matrix")
        exact = all(_is_exact_scalar(v) for r in rows for v in r)
        if exact:
            rows = [[Fraction(v) for v in r] for r in rows]
            for i in range(n):
                for j in range(i):
                    if rows[i][j] != rows[j][i]:
                        raise ValueError("matrix is not symmetric")
            self.dim = n
            self._rows = tuple(tuple(r) for r in rows)
            self._arr = None
            self.mode = EXACT
        else:
            arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
            if not np.array_equal(arr, arr.T):
                raise ValueError("matrix is not symmetric")
            arr.flags.writeable = False
            self.dim = n
            self._arr = arr
            self._rows = None
            self.mode = FLOAT

    @classmethod
    def from_array(cls, arr: np.ndarray, symmetrize: bool = False) -> "SymMat":
        """Wrap a float array; ``symmetrize=True`` averages away asymmetry first."""
        arr = np.asarray(arr, dtype=float)
        if symmetrize:
            arr = 0.5 * (arr + arr.T)
        return cls(arr)

    @classmethod
    def identity(cls, n: int) -> "SymMat":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int) -> "SymMat":
        return cls([[Fraction(0)] * n for _ in range(n)])

    @property
    def array(self) -> np.ndarray:
        """Read-only float64 view of the entries (does not change the mode)."""
        if self._arr is not None:
            return self._arr
        return np.array([[float(v) for v in r] for r in self._rows], dtype=float)

    def entry(self, i: int, j: int):
        if self.mode == EXACT:
            return self._rows[i][j]
        return self._arr[i, j]

    def rows(self):
        if self.mode == EXACT:
            return self._rows
        return tuple(tuple(v for v in r) for r in self._arr)

    def to_float(self) -> "SymMat":
        """Explicit one-way conversion to float mode."""
        if self.mode == FLOAT:
            return self
        return SymMat(self.array)

    def max_abs_entry(self) -> float:
        return float(np.max(np.abs(self.array))) if self.dim else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMat):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.mode == EXACT and other.mode == EXACT:
            return self._rows == other._rows
        return np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash((self.dim, self.mode))

    def __repr__(self) -> str:
        return f"SymMat(dim={self.dim}, mode={self.mode})"


@dataclass(frozen=True)
class SdpPair:
    """Problem data (C, A_1..A_m, b) defining the primal/dual normal-form pair."""

    C: SymMat
    A: tuple
    b: tuple
    name: str = ""

    def __post_init__(self):
        A = tuple(self.A)
        b = tuple(self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if len(A) < 1:
            raise ValueError("need at least one constraint matrix")
        if len(b) != len(A):
            raise ValueError("length of b must match the number of constraints")
        n = self.C.dim
        if any(Ai.dim != n for Ai in A):
            raise ValueError("all constraint matrices must share the objective's dimension")
        modes = {self.C.mode} | {Ai.mode for Ai in A}
        b_exact = all(_is_exact_scalar(v) for v in b)
        if modes == {EXACT} and b_exact:
            object.__setattr__(self, "b", tuple(Fraction(v) for v in b))
        else:
            if EXACT in modes or b_exact:
                # mixed input collapses to float mode
                object.__setattr__(self, "C", self.C.to_float())
                object.__setattr__(self, "A", tuple(Ai.to_float() for Ai in A))
            object.__setattr__(self, "b", tuple(float(v) for v in b))

    @property
    def n(self) -> int:
        return self.C.dim

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def mode(self) -> str:
        return self.C.mode

    @property
    def b_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.b], dtype=float)

    def to_float(self) -> "SdpPair":
        if self.mode == FLOAT:
            return self
        return SdpPair(
            C=self.C.to_float(),
            A=tuple(Ai.to_float() for Ai in self.A),
            b=tuple(float(v) for v in self.b),
            name=self.name,
        )

    def max_abs_entry(self) -> float:
        vals = [self.C.max_abs_entry()] + [Ai.max_abs_entry() for Ai in self.A]
        vals.append(max((abs(float(v)) for v in self.b), default=0.0))
        return max(vals)


@dataclass(frozen=True)
class PrimalPoint:
    X: SymMat


@dataclass(frozen=True)
class DualPoint:
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(self.y))

    @property
    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.y], dtype=float)


@dataclass(frozen=True)
class ResidualReport:
    """Worst-case feasibility/optimality slack of a candidate primal-dual point."""

    min_eig_slack: float
    worst_linear_violation: float
    gap: float

    def __post_init__(self):
        for v in (self.min_eig_slack, self.worst_linear_violation, self.gap):
            if not np.isfinite(v):
                raise ValueError("residual fields must be finite")


def frobenius_inner(A: SymMat, B: SymMat):
    """Trace inner product sum_ij A_ij B_ij; exact when both operands are exact."""
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if A.mode == EXACT and B.mode == EXACT:
        return sum(a * b for ra, rb in zip(A.rows(), B.rows()) for a, b in zip(ra, rb))
    return float(np.tensordot(A.array, B.array, axes=2))


def min_eigenvalue(A: SymMat) -> float:
    """Smallest eigenvalue via a dense symmetric eigensolver."""
    arr = A.array
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.eigvalsh(arr)[0])


def max_eigenvalue(A: SymMat) -> float:
    arr = A.array
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.eigvalsh(arr)[-1])


def is_psd(A: SymMat, tol: float) -> bool:
    """Positive semidefiniteness up to a tolerance relative to the entry scale."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return min_eigenvalue(A) >= -tol * (1.0 + A.max_abs_entry())


def dual_slack_matrix(pair: SdpPair, y) -> SymMat:
    """C - sum_i y_i A_i as a float symmetric matrix."""
    yv = np.asarray([float(v) for v in y], dtype=float)
    if yv.shape[0] != pair.m:
        raise ValueError("multiplier vector has wrong length")
    S = pair.C.array.copy()
    for yi, Ai in zip(yv, pair.A):
        S -= yi * Ai.array
    return SymMat.from_array(S, symmetrize=True)


def residuals(pair: SdpPair, X: PrimalPoint, y: DualPoint) -> ResidualReport:
    """Aggregate feasibility/optimality residuals of a candidate pair (X, y).

    min_eig_slack is the smallest eigenvalue over the psd conditions
    (X, the dual slack C - sum y_i A_i, and the y_i as 1x1 blocks);
    worst_linear_violation is max_i max(0, b_i - <A_i, X>); gap is <C,X> - b'y.
    """
    if X.X.dim != pair.n or len(y.y) != pair.m:
        raise ValueError("dimension mismatch with the problem pair")
    Xf = X.X.to_float() if X.X.mode == EXACT else X.X
    yv = y.array
    slacks = [min_eigenvalue(Xf), min_eigenvalue(dual_slack_matrix(pair, yv))]
    if pair.m:
        slacks.append(float(np.min(yv)))
    lin = 0.0
    for bi, Ai in zip(pair.b_array, pair.A):
        lin = max(lin, bi - frobenius_inner(Ai.to_float(), Xf))
    gap = frobenius_inner(pair.C.to_float(), Xf) - float(pair.b_array @ yv)
    return ResidualReport(
        min_eig_slack=min(slacks),
        worst_linear_violation=max(0.0, lin),
        gap=gap,
    )


def verify_strongly_optimal(pair: SdpPair, X: PrimalPoint, y: DualPoint, tol: float) -> bool:
    """Weak-duality check: primal feasible, dual feasible and gap <= 0, all within tol."""
    if X.X.dim != pair.n or len(y.y) != pair.m:
        raise ValueError("dimension mismatch with the problem pair")
    Xf = X.X.to_float() if X.X.mode == EXACT else X.X
    yv = y.array
    if not is_psd(Xf, tol):
        return False
    y_scale = 1.0 + (float(np.max(np.abs(yv))) if pair.m else 0.0)
    if pair.m and float(np.min(yv)) < -tol * y_scale:
        return False
    for bi, Ai in zip(pair.b_array, pair.A):
        if bi - frobenius_inner(Ai.to_float(), Xf) > tol * (1.0 + abs(bi)):
            return False
    if not is_psd(dual_slack_matrix(pair, yv), tol):
        return False
    obj = frobenius_inner(pair.C.to_float(), Xf)
    gap = obj - float(pair.b_array @ yv)
    return gap <= tol * (1.0 + abs(obj))
