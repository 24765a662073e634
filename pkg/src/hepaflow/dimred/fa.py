"""Factor analysis by principal-component extraction.

The sample covariance S is decomposed as S ~= L L^T + Psi with
L = V_q sqrt(lambda_q) built from the top-q eigenpairs and the uniquenesses
Psi = diag(S - L L^T), floored at zero. This estimator satisfies the
diagonal identity exactly and needs no iteration.

Factor scores are least-squares projections of centered data onto the
loadings (normal equations with a 1e-9 ridge).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from ..numerics import as_matrix, covariance_matrix, solve_linear, symmetric_eig

_SCORE_RIDGE = 1e-9


@dataclass
class FaModel:
    loadings: np.ndarray  # m x q
    uniquenesses: np.ndarray  # m, nonnegative
    column_means: np.ndarray
    q: int


def fa_fit(X, q: int) -> FaModel:
    A = as_matrix(X, "fa input")
    m = A.shape[1]
    if not 1 <= q <= m:
        raise NumericError(f"factor count q={q} outside [1, {m}]")
    S = covariance_matrix(A)
    eigvals, vecs = symmetric_eig(S)
    top = np.maximum(eigvals[:q], 0.0)
    loadings = vecs[:, :q] * np.sqrt(top)
    uniquenesses = np.maximum(np.diag(S - loadings @ loadings.T), 0.0)
    return FaModel(
        loadings=loadings,
        uniquenesses=uniquenesses,
        column_means=A.mean(axis=0),
        q=q,
    )


def fa_transform(model: FaModel, X) -> np.ndarray:
    """Score rows on the fitted factors."""
    A = as_matrix(X, "fa transform input")
    if A.shape[1] != model.loadings.shape[0]:
        raise NumericError(
            f"width {A.shape[1]} does not match training width {model.loadings.shape[0]}"
        )
    centered = A - model.column_means
    L = model.loadings
    gram = L.T @ L + _SCORE_RIDGE * np.eye(model.q)
    return solve_linear(gram, L.T @ centered.T).T
