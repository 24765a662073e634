"""Per-column z-scoring with the population (n denominator) std.

Constant columns are flagged and scaled with std 1: their training rows map
to exactly zero (the stored mean is the constant itself, not a rounded
sum), and unseen values stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from ..numerics import as_matrix


@dataclass
class ScalerModel:
    means: np.ndarray
    stds: np.ndarray  # effective divisors: population std, 1.0 where constant
    constant: np.ndarray  # bool flags


def standard_scale_fit(X) -> ScalerModel:
    A = as_matrix(X, "scaler input")
    if A.shape[0] < 1:
        raise NumericError("scaler needs at least one row")
    means = A.mean(axis=0)
    stds = np.sqrt(np.mean((A - means) ** 2, axis=0))
    constant = np.ptp(A, axis=0) == 0.0
    means = np.where(constant, A[0], means)
    stds = np.where(constant | (stds == 0.0), 1.0, stds)
    return ScalerModel(means=means, stds=stds, constant=constant)


def standard_scale_apply(model: ScalerModel, X) -> np.ndarray:
    A = as_matrix(X, "scaler apply input")
    if A.shape[1] != model.means.shape[0]:
        raise NumericError(
            f"width {A.shape[1]} does not match fitted width {model.means.shape[0]}"
        )
    return (A - model.means) / model.stds
