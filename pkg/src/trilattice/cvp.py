"""Exact closest-vector solvers for the triangular lattice.

Three solvers share one fractional decomposition ``x = w + r`` of the target's
lattice coordinates and differ in how they pick the 0/1 correction ``z``:

* :func:`cv_baseline` - dense O(n^2) algebra, full sort, every candidate's
  distance evaluated explicitly.
* :func:`qlin_cv` - O(n) transforms, sort, binary search on the sign change
  of the first difference of the candidate distances.  O(n log n).
* :func:`lin_cv` - O(n) transforms, a handful of order statistics and a
  threshold pass.  O(n).

Candidate ``k`` adds one to the ``k`` coordinates with the largest fractional
parts.  Ties among fractional parts are broken by position (lower index ranks
higher), so all three solvers see the same candidate sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .basis import TriangularBasis, _cart_to_tri, _tri_to_cart, materialize_dense
from .select import _select_index

__all__ = [
    "FracDecomposition",
    "CvpSolution",
    "CandidateProfile",
    "decompose",
    "candidate_distance",
    "candidate_profile",
    "cv_baseline",
    "qlin_cv",
    "lin_cv",
    "ALGORITHMS",
    "Workspace",
]

# fractional parts are meaningless once the spacing of doubles reaches 1
_MAX_COORD = 2.0**52


@dataclass(frozen=True, eq=False)
class FracDecomposition:
    w: np.ndarray
    r: np.ndarray
    r_sum: float


@dataclass(frozen=True, eq=False)
class CvpSolution:
    """Closest lattice point, its lattice coordinates and the candidate index."""

    point: np.ndarray
    coeffs: np.ndarray
    k: int


@dataclass(frozen=True, eq=False)
class CandidateProfile:
    """Squared candidate distances and their first/second differences.

    ``d[k]`` for k = 0..n, ``delta[k-1]`` is d_k - d_{k-1} for k = 1..n and
    ``delta2[k-2]`` is delta_k - delta_{k-1} for k = 2..n.  ``k`` is the
    minimizing index chosen by the sign rule, ``k_hat`` is floor(r_sum).
    """

    d: np.ndarray
    delta: np.ndarray
    delta2: np.ndarray
    k: int
    k_hat: int
    order: np.ndarray


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _decompose(x, w, r):
    n = x.shape[0]
    r_sum = 0.0
    for i in range(n):
        f = math.floor(x[i])
        ri = x[i] - f
        if ri >= 1.0:
            # x - floor(x) rounds up to 1.0 for tiny negative x
            f += 1.0
            ri = 0.0
        w[i] = np.int64(f)
        r[i] = ri
        r_sum += ri
    return r_sum


@njit(cache=True, inline="always")
def _delta(k, r_sum, r_k):
    # first difference d_k - d_{k-1}, with r_k the k-th largest fractional part
    return (k - r_sum) - r_k


@njit(cache=True)
def _descending_order(r):
    # stable sort of -r: descending values, ties by ascending index
    return np.argsort(-r, kind="mergesort")


@njit(cache=True)
def _back_substitute(B, y, x):
    n = y.shape[0]
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for j in range(i + 1, n):
            acc -= B[i, j] * x[j]
        x[i] = acc / B[i, i]


@njit(cache=True)
def _dense_matvec(B, v, out):
    n = v.shape[0]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += B[i, j] * v[j]
        out[i] = acc


@njit(cache=True)
def _cv_kernel(B, cols, y, x, w, r, diff, fcoeffs, coeffs, point):
    n = y.shape[0]
    _back_substitute(B, y, x)
    _decompose(x, w, r)
    order = _descending_order(r)
    # diff holds B r - B z^k; candidate k subtracts column order[k-1]
    _dense_matvec(B, r, diff)
    best = 0.0
    for i in range(n):
        best += diff[i] * diff[i]
    best_k = 0
    for k in range(1, n + 1):
        col = cols[order[k - 1]]
        d = 0.0
        for i in range(n):
            diff[i] -= col[i]
            d += diff[i] * diff[i]
        if d < best:
            best = d
            best_k = k
    for i in range(n):
        coeffs[i] = w[i]
    for k in range(best_k):
        coeffs[order[k]] += 1
    for i in range(n):
        fcoeffs[i] = coeffs[i]
    _dense_matvec(B, fcoeffs, point)
    return best_k


@njit(cache=True)
def _qlin_choose_k(r, order, r_sum):
    n = r.shape[0]
    if _delta(1, r_sum, r[order[0]]) >= 0.0:
        return 0
    if _delta(n, r_sum, r[order[n - 1]]) <= 0.0:
        return n
    # delta is strictly increasing; find the smallest k in [1, n-1] with
    # delta_{k+1} >= 0 (delta_n > 0 guarantees k = n-1 qualifies)
    lo = 1
    hi = n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _delta(mid + 1, r_sum, r[order[mid]]) >= 0.0:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def _qlin_kernel(alpha, beta, y, x, w, r, fcoeffs, coeffs, point):
    n = y.shape[0]
    _cart_to_tri(alpha, beta, y, x)
    r_sum = _decompose(x, w, r)
    order = _descending_order(r)
    k = _qlin_choose_k(r, order, r_sum)
    for i in range(n):
        coeffs[i] = w[i]
    for j in range(k):
        coeffs[order[j]] += 1
    for i in range(n):
        fcoeffs[i] = coeffs[i]
    _tri_to_cart(alpha, beta, fcoeffs, point)
    return k


@njit(cache=True)
def _lin_choose_k(r, perm, r_sum):
    """Return (k, position of the k-th largest r or -1 when k == 0)."""
    n = r.shape[0]
    i1 = _select_index(r, perm, 1)
    if _delta(1, r_sum, r[i1]) >= 0.0:
        return 0, -1
    i_n = _select_index(r, perm, n)
    if _delta(n, r_sum, r[i_n]) <= 0.0:
        return n, i_n
    # interior case: delta_{k_hat} < 0 < delta_{k_hat + 2}, and k_hat <= n - 1
    k_hat = int(math.floor(r_sum))
    if k_hat == 0:
        return 1, i1
    if k_hat + 1 == n:
        i_next = i_n
    else:
        i_next = _select_index(r, perm, k_hat + 1)
    if _delta(k_hat + 1, r_sum, r[i_next]) >= 0.0:
        if k_hat == 1:
            return 1, i1
        return k_hat, _select_index(r, perm, k_hat)
    return k_hat + 1, i_next


@njit(cache=True)
def _lin_kernel(alpha, beta, y, x, w, r, perm, fcoeffs, coeffs, point, strict_ties):
    n = y.shape[0]
    _cart_to_tri(alpha, beta, y, x)
    r_sum = _decompose(x, w, r)
    for i in range(n):
        perm[i] = i
    k, t = _lin_choose_k(r, perm, r_sum)
    if k == 0:
        for i in range(n):
            coeffs[i] = w[i]
    else:
        tv = r[t]
        for j in range(n):
            if strict_ties:
                take = r[j] > tv or (r[j] == tv and j <= t)
            else:
                take = r[j] >= tv
            coeffs[j] = w[j] + (1 if take else 0)
    for i in range(n):
        fcoeffs[i] = coeffs[i]
    _tri_to_cart(alpha, beta, fcoeffs, point)
    return k


# ---------------------------------------------------------------- public API


def _check_target(basis: TriangularBasis, y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != basis.n:
        raise ValueError(f"target must have shape ({basis.n},), got {y.shape}")
    if not np.isfinite(y).all():
        raise ValueError("target has non-finite components")
    return y


def decompose(x) -> FracDecomposition:
    """Split ``x`` into floors ``w`` and fractional parts ``r`` in [0, 1)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("x must be a 1-d vector")
    if not np.isfinite(x).all():
        raise ValueError("x has non-finite components")
    if x.size and np.abs(x).max() >= _MAX_COORD:
        raise ValueError("coordinates too large for a meaningful fractional part")
    w = np.empty(x.shape[0], dtype=np.int64)
    r = np.empty(x.shape[0])
    r_sum = _decompose(x, w, r)
    return FracDecomposition(w, r, float(r_sum))


class Workspace:
    """Preallocated scratch for repeated solves at one dimension.

    Not safe for concurrent use: two calls sharing a workspace overwrite each
    other's buffers.  ``solve`` returns ``k`` and leaves the result in
    ``coeffs`` and ``point``.
    """

    def __init__(self, basis: TriangularBasis, algorithm: str, dense: np.ndarray | None = None):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}")
        n = basis.n
        self.basis = basis
        self.algorithm = algorithm
        self.x = np.empty(n)
        self.r = np.empty(n)
        self.w = np.empty(n, dtype=np.int64)
        self.perm = np.empty(n, dtype=np.int64)
        self.diff = np.empty(n)
        self.fcoeffs = np.empty(n)
        self.coeffs = np.empty(n, dtype=np.int64)
        self.point = np.empty(n)
        if algorithm == "cv":
            self.dense = materialize_dense(basis) if dense is None else dense
            # basis vectors as contiguous rows for the candidate walk
            self.cols = np.ascontiguousarray(self.dense.T)
        else:
            self.dense = self.cols = None

    def solve(self, y: np.ndarray, strict_ties: bool = True) -> int:
        b = self.basis
        if self.algorithm == "cv":
            return _cv_kernel(self.dense, self.cols, y, self.x, self.w, self.r, self.diff,
                              self.fcoeffs, self.coeffs, self.point)
        if self.algorithm == "qlin":
            return _qlin_kernel(b.alpha, b.beta, y, self.x, self.w, self.r,
                                self.fcoeffs, self.coeffs, self.point)
        return _lin_kernel(b.alpha, b.beta, y, self.x, self.w, self.r, self.perm,
                           self.fcoeffs, self.coeffs, self.point, strict_ties)

    def solver(self):
        """A one-argument callable bound to this workspace, for timing loops."""
        b = self.basis
        x, w, r, perm, diff = self.x, self.w, self.r, self.perm, self.diff
        fc, co, pt = self.fcoeffs, self.coeffs, self.point
        if self.algorithm == "cv":
            B, cols = self.dense, self.cols
            return lambda y: _cv_kernel(B, cols, y, x, w, r, diff, fc, co, pt)
        alpha, beta = b.alpha, b.beta
        if self.algorithm == "qlin":
            return lambda y: _qlin_kernel(alpha, beta, y, x, w, r, fc, co, pt)
        return lambda y: _lin_kernel(alpha, beta, y, x, w, r, perm, fc, co, pt, True)


def _solve(basis, y, algorithm, dense=None, strict_ties=True) -> CvpSolution:
    y = _check_target(basis, y)
    ws = Workspace(basis, algorithm, dense)
    k = ws.solve(y, strict_ties)
    if np.abs(ws.x).max(initial=0.0) >= _MAX_COORD:
        raise ValueError("target too far from the origin for double precision")
    return CvpSolution(ws.point, ws.coeffs, int(k))


def cv_baseline(basis: TriangularBasis, y, dense: np.ndarray | None = None) -> CvpSolution:
    """Conventional O(n^2) solver.

    Solves ``B x = y`` by dense back-substitution, sorts the fractional parts,
    walks all n + 1 candidates updating ``B r - B z^k`` one basis column at a
    time and maps the winner back with a dense product.  Pass ``dense`` (from
    :func:`materialize_dense`) to reuse the matrix across calls.
    """
    return _solve(basis, y, "cv", dense=dense)


def qlin_cv(basis: TriangularBasis, y) -> CvpSolution:
    """O(n log n) solver: sort plus binary search over the candidate index."""
    return _solve(basis, y, "qlin")


def lin_cv(basis: TriangularBasis, y, *, strict_ties: bool = True) -> CvpSolution:
    """O(n) solver: selection of at most four order statistics, then a threshold.

    ``strict_ties=False`` compares fractional parts by value only when
    building ``z``, so repeated values at the threshold all get rounded up.
    That is wrong and exists only as a fault to inject in verification runs.
    """
    return _solve(basis, y, "lin", strict_ties=strict_ties)


ALGORITHMS = {"cv": cv_baseline, "qlin": qlin_cv, "lin": lin_cv}


def candidate_distance(r_sorted, r_sum: float, br_norm_sq: float, k: int) -> float:
    """Closed-form squared distance ``||B r - B z^k||^2``.

    ``r_sorted`` holds the fractional parts in descending order and
    ``br_norm_sq`` is ``||B r||^2``.
    """
    r_sorted = np.asarray(r_sorted, dtype=np.float64)
    n = r_sorted.shape[0]
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range [0, {n}]")
    return float(br_norm_sq + 0.5 * k * k + k * (0.5 - r_sum) - r_sorted[:k].sum())


def candidate_profile(basis: TriangularBasis, y) -> CandidateProfile:
    """Distances d_0..d_n, first and second differences for target ``y``."""
    y = _check_target(basis, y)
    x = np.empty(basis.n)
    _cart_to_tri(basis.alpha, basis.beta, y, x)
    dec = decompose(x)
    order = _descending_order(dec.r)
    rs = dec.r[order]
    br = np.empty(basis.n)
    _tri_to_cart(basis.alpha, basis.beta, dec.r, br)
    ks = np.arange(basis.n + 1)
    prefix = np.concatenate(([0.0], np.cumsum(rs)))
    d = float(br @ br) + 0.5 * ks * ks + ks * (0.5 - dec.r_sum) - prefix
    delta = (ks[1:] - dec.r_sum) - rs
    delta2 = 1.0 - (rs[1:] - rs[:-1])
    k = int(_qlin_choose_k(dec.r, order, dec.r_sum))
    return CandidateProfile(d, delta, delta2, k, int(math.floor(dec.r_sum)), order)
