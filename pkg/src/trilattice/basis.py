"""Triangular lattice basis constants and O(n) coordinate transforms.

The basis matrix is upper triangular with ``alpha[k]`` on the diagonal and
``beta[k]`` in every entry to the right of the diagonal on row ``k``.  It is
never materialized on the production paths; both transforms are single
backward passes that carry the running suffix sum ``s_k = x_{k+1} + ... + x_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "TriangularBasis",
    "build_basis",
    "tri_to_cart",
    "cart_to_tri",
    "materialize_dense",
]


@dataclass(frozen=True, eq=False)
class TriangularBasis:
    """Dimension plus the diagonal/row constants of the implicit basis matrix.

    ``alpha`` and ``beta`` are read-only float64 arrays of length ``n``.
    """

    n: int
    alpha: np.ndarray
    beta: np.ndarray

    def __repr__(self) -> str:
        return f"TriangularBasis(n={self.n})"


def build_basis(n: int) -> TriangularBasis:
    """Compute alpha/beta for the unit-norm triangular lattice of dimension n.

    Uses one running accumulator of sum(beta_i**2), so construction is O(n).
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    alpha = np.empty(n)
    beta = np.empty(n)
    acc = 0.0
    for k in range(n):
        rest = 1.0 - acc
        if not rest > 0.0:
            raise ValueError(f"alpha underflows to a non-positive value at k={k + 1}")
        a = math.sqrt(rest)
        b = (0.5 - acc) / a
        alpha[k] = a
        beta[k] = b
        acc += b * b
    alpha.flags.writeable = False
    beta.flags.writeable = False
    return TriangularBasis(n, alpha, beta)


@njit(cache=True)
def _tri_to_cart(alpha, beta, x, out):
    s = 0.0
    for k in range(x.shape[0] - 1, -1, -1):
        out[k] = alpha[k] * x[k] + beta[k] * s
        s += x[k]


@njit(cache=True)
def _cart_to_tri(alpha, beta, y, out):
    s = 0.0
    for k in range(y.shape[0] - 1, -1, -1):
        xk = (y[k] - beta[k] * s) / alpha[k]
        out[k] = xk
        s += xk


def _as_vector(basis: TriangularBasis, v, name: str) -> np.ndarray:
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != basis.n:
        raise ValueError(f"{name} must have shape ({basis.n},), got {v.shape}")
    return v


def tri_to_cart(basis: TriangularBasis, x) -> np.ndarray:
    """Return ``B @ x`` for lattice coordinates ``x``."""
    x = _as_vector(basis, x, "x")
    out = np.empty(basis.n)
    _tri_to_cart(basis.alpha, basis.beta, x, out)
    return out


def cart_to_tri(basis: TriangularBasis, y) -> np.ndarray:
    """Return ``B^-1 @ y`` for Cartesian coordinates ``y``."""
    y = _as_vector(basis, y, "y")
    out = np.empty(basis.n)
    _cart_to_tri(basis.alpha, basis.beta, y, out)
    return out


def materialize_dense(basis: TriangularBasis) -> np.ndarray:
    """Explicit n x n basis matrix (columns are the basis vectors).

    Only the baseline solver and the verification oracle use this.
    """
    n = basis.n
    B = np.triu(np.repeat(basis.beta[:, None], n, axis=1), k=1)
    B[np.diag_indices(n)] = basis.alpha
    return B
