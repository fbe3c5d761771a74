"""Seeded target generation and solver timing.

Targets come from numpy's PCG64 generator seeded directly with the 64-bit
seed, so a given ``(seed, n, count, lo, hi)`` always yields the same vectors
on the same numpy version.  Timing uses ``time.perf_counter_ns`` (monotonic).
The mean is the total loop time divided by the number of trials; per-call
samples (consecutive clock reads, so they sum to the total) feed the
percentiles.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .basis import build_basis
from .cvp import ALGORITHMS, Workspace

__all__ = [
    "BenchRecord",
    "SCHEMA",
    "CSV_FIELDS",
    "gen_targets",
    "target_matrix",
    "run_bench",
    "records_to_csv",
    "records_to_json",
]

SCHEMA = 1
CSV_FIELDS = (
    "schema", "algorithm", "n", "trials", "seed",
    "total_seconds", "mean_micros", "p50_micros", "p99_micros",
)
TIMING_FIELDS = ("total_seconds", "mean_micros", "p50_micros", "p99_micros")

_CHUNK_ROWS = 1024
_sink = 0


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    trials: int
    total_seconds: float
    mean_micros: float
    p50_micros: float
    p99_micros: float
    seed: int
    schema: int = SCHEMA

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in CSV_FIELDS}


def _rng(seed: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _check_range(n, count, lo, hi):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"invalid range [{lo}, {hi}]")


def gen_targets(n: int, count: int, seed: int, lo: float = -100.0,
                hi: float = 100.0) -> Iterator[np.ndarray]:
    """Yield ``count`` vectors with i.i.d. uniform components on [lo, hi]."""
    _check_range(n, count, lo, hi)
    rng = _rng(seed)
    left = count
    while left:
        rows = min(left, _CHUNK_ROWS)
        yield from rng.uniform(lo, hi, size=(rows, n))
        left -= rows


def target_matrix(n: int, count: int, seed: int, lo: float = -100.0,
                  hi: float = 100.0) -> np.ndarray:
    """Same vectors as :func:`gen_targets`, stacked into a (count, n) array."""
    _check_range(n, count, lo, hi)
    return _rng(seed).uniform(lo, hi, size=(count, n))


def run_bench(algorithm: str, n: int, trials: int, seed: int = 0,
              warmup: int = 100) -> BenchRecord:
    """Time ``trials`` solver calls on seeded targets in [-100, 100]^n.

    Only the solver call sits inside the timed region; targets are generated
    up front and buffers are preallocated.  Every result feeds a sink so the
    work cannot be skipped.
    """
    global _sink
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    basis = build_basis(n)
    solve = Workspace(basis, algorithm).solver()
    targets = target_matrix(n, trials, seed)
    for i in range(warmup):
        _sink ^= solve(targets[i % trials])

    # chained timestamps: one clock read per call, and the per-call samples
    # add up exactly to the total
    clock = time.perf_counter_ns
    samples = np.empty(trials, dtype=np.int64)
    acc = 0
    start = prev = clock()
    for i in range(trials):
        acc ^= solve(targets[i])
        now = clock()
        samples[i] = now - prev
        prev = now
    total_ns = prev - start
    _sink ^= acc

    p50, p99 = np.percentile(samples, [50, 99]) / 1e3
    return BenchRecord(
        algorithm=algorithm,
        n=n,
        trials=trials,
        total_seconds=total_ns / 1e9,
        mean_micros=total_ns / 1e3 / trials,
        p50_micros=float(p50),
        p99_micros=float(p99),
        seed=seed,
    )


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def records_to_json(records) -> str:
    return json.dumps([rec.row() for rec in records], indent=2) + "\n"
