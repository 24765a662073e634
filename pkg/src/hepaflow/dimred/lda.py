"""Linear discriminant analysis via scatter matrices.

The within-class scatter S_w sums (x - mu_i)(x - mu_i)^T over every sample;
the between-class scatter S_b sums N_i (mu_i - mu)(mu_i - mu)^T over
classes. Projection directions solve S_w^-1 S_b w = lambda w, which is
reduced to an ordinary symmetric problem by congruence with S_w^-1/2 (exact,
unlike symmetrizing S_w^-1 S_b directly). For binary labels the projection
width is clamped to one column and agrees with the analytic direction
S_w^-1 (mu_1 - mu_0).

A singular S_w gets one ridge retry: S_w + eps * trace(S_w)/m * I with
eps = 1e-8 (an absolute eps * I when the trace is zero), which covers the
duplicated-row datasets this pipeline produces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from ..numerics import as_matrix, inverse_sqrt_spd, symmetric_eig

_RIDGE_EPS = 1e-8


@dataclass
class LdaModel:
    projection: np.ndarray  # m x d, unit-norm generalized eigenvectors
    class_means: np.ndarray  # K x m, in ascending label order
    global_mean: np.ndarray
    s_w: np.ndarray
    s_b: np.ndarray
    eigenvalues: np.ndarray  # descending, one per projection column
    classes: np.ndarray


def scatter_matrices(X, y) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(S_w, S_b, class_means, global_mean, classes) for labelled data."""
    A = as_matrix(X, "lda input")
    labels = np.asarray(y, dtype=np.int64)
    if labels.shape[0] != A.shape[0]:
        raise NumericError(f"{A.shape[0]} rows vs {labels.shape[0]} labels")
    classes = np.unique(labels)
    if classes.size < 2:
        raise NumericError("LDA requires at least two classes")
    m = A.shape[1]
    mu = A.mean(axis=0)
    s_w = np.zeros((m, m))
    s_b = np.zeros((m, m))
    means = np.empty((classes.size, m))
    for idx, cls in enumerate(classes):
        block = A[labels == cls]
        mu_i = block.mean(axis=0)
        means[idx] = mu_i
        centered = block - mu_i
        s_w += centered.T @ centered
        delta = (mu_i - mu)[:, None]
        s_b += block.shape[0] * (delta @ delta.T)
    return s_w, s_b, means, mu, classes


def _regularized(s_w: np.ndarray) -> np.ndarray:
    m = s_w.shape[0]
    trace = float(np.trace(s_w))
    ridge = _RIDGE_EPS * trace / m if trace > 0 else _RIDGE_EPS
    return s_w + ridge * np.eye(m)


def lda_fit(X, y, d: int | None = None) -> LdaModel:
    """Fit the discriminant projection; ``d`` is clamped to K - 1 columns."""
    s_w, s_b, means, mu, classes = scatter_matrices(X, y)
    m = s_w.shape[0]
    k = classes.size
    width = min(d if d is not None else k - 1, k - 1, m)
    if width < 1:
        raise NumericError(f"no discriminant directions available (d={d}, K={k})")

    try:
        w_inv_sqrt = inverse_sqrt_spd(s_w)
    except NumericError:
        try:
            w_inv_sqrt = inverse_sqrt_spd(_regularized(s_w))
        except NumericError as exc:
            raise NumericError(f"S_w singular even after ridge: {exc}") from exc

    c = w_inv_sqrt @ s_b @ w_inv_sqrt
    eigvals, vecs = symmetric_eig((c + c.T) / 2.0)
    # columns satisfy w^T S_w w = n - K: unit pooled within-class variance,
    # so the projected scale is commensurate with factor scores downstream
    n = X.shape[0] if hasattr(X, "shape") else len(X)
    projection = w_inv_sqrt @ vecs[:, :width] * np.sqrt(max(n - k, 1))
    for j in range(width):
        pivot = int(np.argmax(np.abs(projection[:, j])))
        if projection[pivot, j] < 0:
            projection[:, j] = -projection[:, j]

    return LdaModel(
        projection=projection,
        class_means=means,
        global_mean=mu,
        s_w=s_w,
        s_b=s_b,
        eigenvalues=eigvals[:width],
        classes=classes,
    )


def lda_transform(model: LdaModel, X) -> np.ndarray:
    """Project centered rows: (X - mu) @ projection."""
    A = as_matrix(X, "lda transform input")
    if A.shape[1] != model.projection.shape[0]:
        raise NumericError(
            f"width {A.shape[1]} does not match training width {model.projection.shape[0]}"
        )
    return (A - model.global_mean) @ model.projection


def binary_direction(X, y) -> np.ndarray:
    """Analytic K=2 shortcut, S_w^-1 (mu_1 - mu_0), as a unit vector.

    Used as an independent cross-check of the eigensolver path.
    """
    from ..numerics import solve_linear

    s_w, _, means, _, classes = scatter_matrices(X, y)
    if classes.size != 2:
        raise NumericError("binary_direction requires exactly two classes")
    w = solve_linear(_regularized(s_w), means[1] - means[0])
    norm = float(np.linalg.norm(w))
    if norm == 0:
        raise NumericError("degenerate class means")
    w = w / norm
    pivot = int(np.argmax(np.abs(w)))
    return -w if w[pivot] < 0 else w
