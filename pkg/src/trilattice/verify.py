"""Self-check suite behind ``trilattice verify``.

Three stages, each reported as per-dimension pass counts:

* oracle equivalence - every solver reaches the brute-force optimum (n <= 6);
* triple agreement - the three solvers return identical coefficients;
* invariants - convexity of the candidate distances, the two-candidate
  rule, popcount of ``z``, idempotence and lattice membership, on random
  targets, targets with repeated fractional parts and lattice points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import build_basis, cart_to_tri, materialize_dense, tri_to_cart
from .cvp import candidate_profile, cv_baseline, decompose, lin_cv, qlin_cv
from .oracle import brute_force_cvp, dist_sq

__all__ = ["PropertyCount", "VerifyReport", "verify", "adversarial_target", "ORACLE_MAX_N"]

ORACLE_MAX_N = 6
INVARIANT_MAX_N = 64
REL_TOL = 1e-9
MEMBERSHIP_TOL = 1e-6

_STAGES = {"oracle": 1, "agreement": 2, "invariants": 3}


@dataclass
class PropertyCount:
    name: str
    n: int
    passed: int = 0
    total: int = 0

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def add(self, good: bool) -> None:
        self.total += 1
        self.passed += bool(good)


@dataclass
class VerifyReport:
    n_max: int
    trials_per_n: int
    seed: int
    counts: list[PropertyCount] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.counts)

    def totals(self) -> dict[str, tuple[int, int]]:
        out: dict[str, tuple[int, int]] = {}
        for c in self.counts:
            p, t = out.get(c.name, (0, 0))
            out[c.name] = (p + c.passed, t + c.total)
        return out

    def as_dict(self) -> dict:
        return {
            "schema": 1,
            "n_max": self.n_max,
            "trials_per_n": self.trials_per_n,
            "seed": self.seed,
            "ok": self.ok,
            "properties": [
                {"property": c.name, "n": c.n, "passed": c.passed, "total": c.total}
                for c in self.counts
            ],
        }


def _rng(seed: int, stage: str, n: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _STAGES[stage], n]))


def adversarial_target(basis, rng: np.random.Generator, kind: str) -> np.ndarray:
    """A target whose lattice coordinates repeat fractional parts, or a lattice point.

    ``kind`` is ``"duplicated"`` (fractions drawn from {0, 1/4, 1/2, 3/4}) or
    ``"integral"``.
    """
    x = rng.integers(-50, 50, basis.n).astype(np.float64)
    if kind == "duplicated":
        x += rng.integers(0, 4, basis.n) / 4
    elif kind != "integral":
        raise ValueError(f"unknown target kind {kind!r}")
    return tri_to_cart(basis, x)


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=0.0)


def _agreement_dims(n_max: int) -> list[int]:
    dims = set(range(1, min(n_max, 8) + 1))
    p = 16
    while p <= n_max:
        dims.add(p)
        p *= 2
    dims.add(n_max)
    return sorted(dims)


def _oracle_stage(report, n, trials, seed):
    basis = build_basis(n)
    B = materialize_dense(basis)
    rng = _rng(seed, "oracle", n)
    count = PropertyCount("oracle_exact", n)
    for _ in range(trials):
        y = rng.uniform(-100.0, 100.0, n)
        best = brute_force_cvp(basis, y, dense=B).best_dist_sq
        count.add(all(
            _close(dist_sq(basis, y, sol.coeffs, B), best)
            for sol in (cv_baseline(basis, y, B), qlin_cv(basis, y), lin_cv(basis, y))
        ))
    report.counts.append(count)


def _agreement_stage(report, n, trials, seed):
    basis = build_basis(n)
    B = materialize_dense(basis)
    rng = _rng(seed, "agreement", n)
    count = PropertyCount("triple_agreement", n)
    for _ in range(trials):
        y = rng.uniform(-100.0, 100.0, n)
        a = cv_baseline(basis, y, B).coeffs
        q = qlin_cv(basis, y).coeffs
        li = lin_cv(basis, y).coeffs
        count.add(np.array_equal(a, q) and np.array_equal(q, li))
    report.counts.append(count)


def _invariant_stage(report, n, trials, seed, strict_ties):
    basis = build_basis(n)
    B = materialize_dense(basis)
    rng = _rng(seed, "invariants", n)
    names = ("convexity", "two_candidate", "popcount", "idempotence",
             "lattice_membership", "tie_agreement")
    counts = {name: PropertyCount(name, n) for name in names}
    kinds = ("random", "duplicated", "integral")
    for i in range(trials):
        kind = kinds[i % 3]
        if kind == "random":
            y = rng.uniform(-100.0, 100.0, n)
        else:
            y = adversarial_target(basis, rng, kind)
        sol = lin_cv(basis, y, strict_ties=strict_ties)
        prof = candidate_profile(basis, y)

        slack = 1e-9 * max(1.0, float(np.abs(prof.d).max()))
        counts["convexity"].add(
            bool(np.all(prof.delta2 > 0)) and prof.d[sol.k] <= prof.d.min() + slack
        )
        if prof.delta[0] < 0 and prof.delta[-1] > 0:
            counts["two_candidate"].add(sol.k in (prof.k_hat, prof.k_hat + 1))

        z = sol.coeffs - decompose(cart_to_tri(basis, y)).w
        counts["popcount"].add(bool(np.all((z == 0) | (z == 1))) and int(z.sum()) == sol.k)

        again = lin_cv(basis, sol.point, strict_ties=strict_ties)
        counts["idempotence"].add(np.array_equal(again.coeffs, sol.coeffs))

        dev = np.abs(cart_to_tri(basis, sol.point) - sol.coeffs).max()
        counts["lattice_membership"].add(dev < MEMBERSHIP_TOL)

        if kind != "random":
            others = (cv_baseline(basis, y, B).coeffs, qlin_cv(basis, y).coeffs)
            same = all(np.array_equal(c, sol.coeffs) for c in others)
            ref = dist_sq(basis, y, sol.coeffs, B)
            counts["tie_agreement"].add(
                same or all(_close(dist_sq(basis, y, c, B), ref) for c in others)
            )
    report.counts.extend(counts.values())


def verify(n_max: int = 512, trials_per_n: int = 1000, seed: int = 0, *,
           strict_ties: bool = True) -> VerifyReport:
    """Run all stages and collect pass counts.

    The oracle stage covers n = 1..min(n_max, 6), agreement covers 1..8 plus
    powers of two up to ``n_max``, and invariants cover the agreement
    dimensions up to 64.  ``strict_ties=False`` injects the value-only
    threshold fault into ``lin_cv``; the popcount property should then fail on
    targets with repeated fractional parts.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if trials_per_n < 1:
        raise ValueError("trials_per_n must be >= 1")
    report = VerifyReport(n_max, trials_per_n, seed)
    for n in range(1, min(n_max, ORACLE_MAX_N) + 1):
        _oracle_stage(report, n, trials_per_n, seed)
    dims = _agreement_dims(n_max)
    for n in dims:
        _agreement_stage(report, n, trials_per_n, seed)
    for n in dims:
        if n <= INVARIANT_MAX_N:
            _invariant_stage(report, n, trials_per_n, seed, strict_ties)
    return report
