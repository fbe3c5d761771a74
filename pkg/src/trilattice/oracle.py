"""Brute-force closest-vector search for small dimensions.

Enumerates every integer coefficient vector in a box around the floor of the
target's lattice coordinates and evaluates distances with the explicit basis
matrix.  It deliberately does not assume that the optimum differs from the
floor by a 0/1 vector: the default box has half-width 2 and is widened
whenever the winner sits on its boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .basis import TriangularBasis, materialize_dense

__all__ = ["OracleResult", "brute_force_cvp", "dist_sq", "MAX_ORACLE_DIM"]

MAX_ORACLE_DIM = 10
_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class OracleResult:
    best_coeffs: np.ndarray
    best_dist_sq: float
    runner_up_gap: float
    window: int


def dist_sq(basis: TriangularBasis, y, coeffs, dense: np.ndarray | None = None) -> float:
    """Squared distance from ``y`` to the lattice point with coordinates ``coeffs``."""
    B = materialize_dense(basis) if dense is None else dense
    diff = np.asarray(y, dtype=np.float64) - B @ np.asarray(coeffs, dtype=np.float64)
    return float(diff @ diff)


def _search(B, y, center, window):
    n = center.shape[0]
    side = 2 * window + 1
    total = side**n
    # the residual for coefficients center + off is t - B @ off
    t = y - B @ center.astype(np.float64)
    best = second = np.inf
    best_off = None
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        off = np.stack(np.unravel_index(idx, (side,) * n), axis=1) - window
        res = t[None, :] - off @ B.T
        d = np.einsum("ij,ij->i", res, res)
        two = np.argpartition(d, 1)[:2] if d.shape[0] > 1 else np.array([0])
        two = two[np.argsort(d[two], kind="stable")]
        for j in two:
            dj = d[j]
            if dj < best:
                second, best = best, dj
                best_off = off[j].copy()
            elif dj < second:
                second = dj
    return best_off, best, second


def brute_force_cvp(basis: TriangularBasis, y, window: int = 2,
                    dense: np.ndarray | None = None) -> OracleResult:
    """Exhaustive closest-vector search in a box of half-width ``window``.

    ``runner_up_gap`` is the second-best squared distance minus the best one,
    so a zero gap means the target is equidistant from two lattice points.
    """
    n = basis.n
    if n > MAX_ORACLE_DIM:
        raise ValueError(f"oracle enumeration limited to n <= {MAX_ORACLE_DIM}, got {n}")
    if window < 1:
        raise ValueError("window must be >= 1")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n,):
        raise ValueError(f"target must have shape ({n},), got {y.shape}")
    if not np.isfinite(y).all():
        raise ValueError("target has non-finite components")
    B = materialize_dense(basis) if dense is None else dense
    center = np.floor(solve_triangular(B, y)).astype(np.int64)
    while True:
        off, best, second = _search(B, y, center, window)
        if np.abs(off).max() < window:
            break
        # winner on the box boundary: a wider box might do better
        window += 1
    if n == 1 and not np.isfinite(second):
        second = best
    return OracleResult(center + off, float(best), float(second - best), window)
