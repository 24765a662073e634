"""Deterministic numeric foundations: linear algebra kernels and seeded RNG."""

from .linalg import (
    as_matrix,
    covariance_matrix,
    inverse_sqrt_spd,
    pairwise_sq_dists,
    quantile,
    solve_linear,
    symmetric_eig,
)
from .rng import SeededRng, derive_substream, mix64

__all__ = [
    "SeededRng",
    "as_matrix",
    "covariance_matrix",
    "derive_substream",
    "inverse_sqrt_spd",
    "mix64",
    "pairwise_sq_dists",
    "quantile",
    "solve_linear",
    "symmetric_eig",
]
