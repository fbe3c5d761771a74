"""Order-statistic selection under a strict total order.

Elements are ranked in descending order of value, with equal values ranked by
ascending position.  Every element therefore has a unique rank, which is what
lets the threshold construction of the linear-time solver put exactly ``k``
ones into ``z`` even when fractional parts repeat.

The workhorse is an introselect: median-of-three quickselect until a depth
budget of ``2 * log2(n)`` partitions is spent, then median-of-medians pivots,
which keeps the worst case linear.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["select_order_stats", "select_order_indices"]

_SMALL = 10


@njit(cache=True, inline="always")
def _before(r, a, b):
    # a strictly precedes b in descending (value, -index) order
    return r[a] > r[b] or (r[a] == r[b] and a < b)


@njit(cache=True)
def _insertion_sort(r, perm, lo, hi):
    for i in range(lo + 1, hi):
        p = perm[i]
        j = i - 1
        while j >= lo and _before(r, p, perm[j]):
            perm[j + 1] = perm[j]
            j -= 1
        perm[j + 1] = p


@njit(cache=True)
def _partition(r, perm, lo, hi, pivot_pos):
    """Lomuto partition of perm[lo:hi] around perm[pivot_pos]; returns its final slot."""
    last = hi - 1
    perm[pivot_pos], perm[last] = perm[last], perm[pivot_pos]
    p = perm[last]
    store = lo
    for i in range(lo, last):
        if _before(r, perm[i], p):
            perm[i], perm[store] = perm[store], perm[i]
            store += 1
    perm[store], perm[last] = perm[last], perm[store]
    return store


@njit(cache=True)
def _median_of_three(r, perm, lo, hi):
    mid = lo + (hi - lo) // 2
    a, b, c = lo, mid, hi - 1
    if _before(r, perm[b], perm[a]):
        a, b = b, a
    if _before(r, perm[c], perm[b]):
        b, c = c, b
        if _before(r, perm[b], perm[a]):
            a, b = b, a
    return b


@njit(cache=True)
def _introselect(r, perm, lo, hi, pos, budget):
    """Rearrange perm[lo:hi] so perm[pos] holds the element of rank pos.

    Everything in perm[lo:pos] precedes it and everything in perm[pos+1:hi]
    follows it.  ``budget`` is the number of median-of-three partitions
    allowed before switching to median-of-medians pivots.

    The median-of-medians step needs a nested selection; it runs on an
    explicit stack of suspended frames since numba's on-disk cache does not
    handle recursive functions.
    """
    st_lo = np.empty(64, dtype=np.int64)
    st_hi = np.empty(64, dtype=np.int64)
    st_pos = np.empty(64, dtype=np.int64)
    depth = 0
    piv = -1
    while True:
        if piv < 0:
            if hi - lo <= _SMALL:
                _insertion_sort(r, perm, lo, hi)
                piv = -2
            elif budget > 0:
                budget -= 1
                piv = _median_of_three(r, perm, lo, hi)
            else:
                # groups of five: sort each, move its median to the front,
                # then select the median of those medians as a child frame
                ngroups = 0
                for g in range(lo, hi, 5):
                    ge = min(g + 5, hi)
                    _insertion_sort(r, perm, g, ge)
                    m = g + (ge - g) // 2
                    perm[lo + ngroups], perm[m] = perm[m], perm[lo + ngroups]
                    ngroups += 1
                st_lo[depth] = lo
                st_hi[depth] = hi
                st_pos[depth] = pos
                depth += 1
                hi = lo + ngroups
                pos = lo + ngroups // 2
                continue
        if piv >= 0:
            p = _partition(r, perm, lo, hi, piv)
            piv = -1
            if p < pos:
                lo = p + 1
                continue
            if p > pos:
                hi = p
                continue
        # frame finished: perm[pos] is in its final place
        if depth == 0:
            return
        piv = pos
        depth -= 1
        lo = st_lo[depth]
        hi = st_hi[depth]
        pos = st_pos[depth]


@njit(cache=True)
def _depth_budget(n):
    b = 0
    while n > 1:
        n >>= 1
        b += 1
    return 2 * b


@njit(cache=True)
def _select_index(r, perm, rank):
    """Position (into r) of the element of 1-based descending ``rank``.

    ``perm`` is scratch of length n; it must hold a permutation of 0..n-1
    on entry and still holds one on exit.  Ranks 1 and n are a single scan.
    """
    n = r.shape[0]
    if rank == 1:
        best = 0
        for i in range(1, n):
            if r[i] > r[best]:
                best = i
        return best
    if rank == n:
        worst = n - 1
        for i in range(n - 2, -1, -1):
            if r[i] < r[worst]:
                worst = i
        return worst
    _introselect(r, perm, 0, n, rank - 1, _depth_budget(n))
    return perm[rank - 1]


@njit(cache=True)
def _select_many(r, ranks, budget, out):
    n = r.shape[0]
    perm = np.arange(n)
    for j in range(ranks.shape[0]):
        rank = ranks[j]
        if budget < 0:
            out[j] = _select_index(r, perm, rank)
        else:
            _introselect(r, perm, 0, n, rank - 1, budget)
            out[j] = perm[rank - 1]


def select_order_indices(r, ranks, *, depth_budget: int | None = None) -> dict[int, int]:
    """Map each 1-based descending rank to the position in ``r`` holding it.

    ``depth_budget`` overrides the quickselect budget (0 forces
    median-of-medians pivots from the start); mainly for tests.
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] == 0:
        raise ValueError("r must be a non-empty 1-d vector")
    n = r.shape[0]
    rank_list = sorted({int(k) for k in ranks})
    for k in rank_list:
        if not 1 <= k <= n:
            raise ValueError(f"rank {k} out of range [1, {n}]")
    if not rank_list:
        return {}
    out = np.empty(len(rank_list), dtype=np.int64)
    budget = -1 if depth_budget is None else int(depth_budget)
    _select_many(r, np.asarray(rank_list, dtype=np.int64), budget, out)
    return dict(zip(rank_list, out.tolist()))


def select_order_stats(r, ranks, *, depth_budget: int | None = None) -> dict[int, float]:
    """Return ``{rank: value}`` for the requested descending ranks of ``r``.

    The caller's vector is not modified.

    >>> select_order_stats([0.1, 0.9, 0.5], {1, 3})
    {1: 0.9, 3: 0.1}
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    idx = select_order_indices(r, ranks, depth_budget=depth_budget)
    return {k: float(r[i]) for k, i in idx.items()}
