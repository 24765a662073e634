"""Deterministic numerical kernels shared by every other module.

Matrices are plain 2-D float64 numpy arrays in C (row-major) order. Public
operations validate finiteness at the boundary and raise
:class:`~hepaflow.errors.NumericError` instead of propagating NaNs.

Conventions (neither is forced by the problem, both are pinned here):

* quantiles interpolate linearly at rank position ``h = (n - 1) * p``
  (the common "type 7" rule),
* covariance uses the sample (n - 1) denominator.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, C-contiguous float64 2-D array."""
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise NumericError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericError(f"{name} contains non-finite entries")
    return a


def quantile(xs, p: float) -> float:
    """Linear-interpolation quantile at rank position h = (n - 1) * p."""
    a = np.asarray(xs, dtype=np.float64).ravel()
    if a.size == 0:
        raise NumericError("quantile of empty sequence")
    if np.isnan(a).any():
        raise NumericError("quantile input contains NaN")
    if not 0.0 <= p <= 1.0:
        raise NumericError(f"quantile position p={p} outside [0, 1]")
    a = np.sort(a)
    h = (a.size - 1) * p
    lo = int(np.floor(h))
    hi = min(lo + 1, a.size - 1)
    frac = h - lo
    return float(a[lo] + (a[hi] - a[lo]) * frac)


def covariance_matrix(X) -> np.ndarray:
    """Sample covariance (n - 1 denominator), symmetric by construction."""
    A = as_matrix(X, "covariance input")
    n = A.shape[0]
    if n < 2:
        raise NumericError(f"covariance needs >= 2 rows, got {n}")
    centered = A - A.mean(axis=0)
    S = centered.T @ centered / (n - 1)
    return (S + S.T) / 2.0


def pairwise_sq_dists(X) -> np.ndarray:
    """Squared Euclidean distances between all rows.

    Symmetric with an exactly-zero diagonal; tiny negative values from
    cancellation are clamped to 0.
    """
    A = as_matrix(X, "pairwise input")
    sq = np.einsum("ij,ij->i", A, A)
    D = sq[:, None] + sq[None, :] - 2.0 * (A @ A.T)
    D = (D + D.T) / 2.0
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def solve_linear(A, B) -> np.ndarray:
    """Solve A X = B by Gaussian elimination with partial pivoting."""
    M = as_matrix(A, "solve A").copy()
    n = M.shape[0]
    if M.shape[1] != n:
        raise NumericError(f"solve needs square A, got {M.shape}")
    rhs = np.asarray(B, dtype=np.float64)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    R = as_matrix(rhs, "solve B").copy()
    if R.shape[0] != n:
        raise NumericError(f"B has {R.shape[0]} rows, expected {n}")

    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(M[col:, col])))
        pivot = M[pivot_row, col]
        if abs(pivot) <= 1e-12:
            raise NumericError(
                f"singular system: pivot {pivot:.3e} at column {col} below 1e-12"
            )
        if pivot_row != col:
            M[[col, pivot_row]] = M[[pivot_row, col]]
            R[[col, pivot_row]] = R[[pivot_row, col]]
        factors = M[col + 1 :, col] / pivot
        M[col + 1 :, col:] -= factors[:, None] * M[col, col:]
        R[col + 1 :] -= factors[:, None] * R[col]

    X = np.empty_like(R)
    for row in range(n - 1, -1, -1):
        X[row] = (R[row] - M[row, row + 1 :] @ X[row + 1 :]) / M[row, row]
    return X[:, 0] if squeeze else X


def symmetric_eig(A, sym_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns. Each eigenvector's largest-magnitude component
    is made positive so the decomposition is unique up to degeneracy.
    """
    M = as_matrix(A, "eig input")
    n = M.shape[0]
    if M.shape[1] != n:
        raise NumericError(f"eig needs a square matrix, got {M.shape}")
    asym = float(np.max(np.abs(M - M.T))) if n else 0.0
    if asym > sym_tol:
        raise NumericError(f"matrix asymmetry {asym:.3e} exceeds {sym_tol:.0e}")

    S = (M + M.T) / 2.0
    V = np.eye(n)
    scale = float(np.max(np.abs(S))) if n else 0.0
    if scale == 0.0:
        return np.zeros(n), V

    for _ in range(100):  # sweeps; quadratic convergence in practice
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(S[p, q]))
        if off <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = S[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                theta = (S[q, q] - S[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * S[:, p] - s * S[:, q]
                rot_q = s * S[:, p] + c * S[:, q]
                S[:, p], S[:, q] = rot_p, rot_q
                rot_p = c * S[p, :] - s * S[q, :]
                rot_q = s * S[p, :] + c * S[q, :]
                S[p, :], S[q, :] = rot_p, rot_q
                S[p, q] = S[q, p] = 0.0
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q

    eigvals = np.diag(S).copy()
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    V = V[:, order]
    for j in range(n):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return eigvals, V


def inverse_sqrt_spd(A, floor: float = 1e-12) -> np.ndarray:
    """Symmetric inverse square root of a symmetric positive-definite matrix."""
    eigvals, V = symmetric_eig(A)
    if eigvals[-1] <= floor * max(1.0, eigvals[0]):
        raise NumericError(
            f"matrix not positive definite enough: min eigenvalue {eigvals[-1]:.3e}"
        )
    return (V / np.sqrt(eigvals)) @ V.T
