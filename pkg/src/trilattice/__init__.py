"""Exact closest-vector solvers for n-dimensional triangular lattices."""

from .basis import TriangularBasis, build_basis, cart_to_tri, materialize_dense, tri_to_cart
from .cvp import (
    CandidateProfile,
    CvpSolution,
    FracDecomposition,
    Workspace,
    candidate_distance,
    candidate_profile,
    cv_baseline,
    decompose,
    lin_cv,
    qlin_cv,
)
from .oracle import OracleResult, brute_force_cvp
from .select import select_order_indices, select_order_stats

__version__ = "0.1.0"

__all__ = [
    "TriangularBasis",
    "build_basis",
    "tri_to_cart",
    "cart_to_tri",
    "materialize_dense",
    "FracDecomposition",
    "CvpSolution",
    "CandidateProfile",
    "Workspace",
    "decompose",
    "candidate_distance",
    "candidate_profile",
    "cv_baseline",
    "qlin_cv",
    "lin_cv",
    "OracleResult",
    "brute_force_cvp",
    "select_order_stats",
    "select_order_indices",
]
