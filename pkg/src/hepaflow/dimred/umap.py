"""UMAP: fuzzy k-NN graph construction and negative-sampled layout.

Construction follows the standard recipe on an exact neighbor graph:
per-point connectivity offsets rho_i (distance to the nearest neighbor),
bandwidths sigma_i bisected so the smoothed neighborhood cardinality hits
log2(n_neighbors), directed memberships exp(-max(0, d - rho_i) / sigma_i),
and the probabilistic-OR fuzzy union w = w_ij + w_ji - w_ij w_ji.

The low-dimensional kernel (1 + a d^(2b))^-1 has (a, b) least-squares
fitted to the min_dist target curve. The layout starts from seeded
uniform(-10, 10) coordinates (instead of a spectral guess, for
reproducibility across implementations) and is optimized by per-edge
attraction plus uniformly drawn negative samples with a linearly decaying
step, delegated to the selected kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import NumericError
from ..numerics import SeededRng, as_matrix, pairwise_sq_dists, solve_linear

_SIGMA_STEPS = 64
_SIGMA_TOL = 1e-5  # inside the 1e-4 cardinality contract
_SIGMA_FLOOR = 1e-12
_INITIAL_ALPHA = 1.0
_REPULSION = 1.0


@dataclass(frozen=True)
class UmapConfig:
    out_dims: int = 3
    n_neighbors: int = 15
    min_dist: float = 0.1
    epochs: int = 200
    negative_samples: int = 5
    a: float | None = None
    b: float | None = None

    def validate(self) -> None:
        if self.out_dims < 1:
            raise NumericError("UMAP needs out_dims >= 1")
        if self.n_neighbors < 2:
            raise NumericError("n_neighbors must be >= 2")
        if not 0.0 <= self.min_dist:
            raise NumericError("min_dist must be >= 0")
        if self.epochs < 1:
            raise NumericError("epochs must be >= 1")
        if (self.a is None) != (self.b is None):
            raise NumericError("set both kernel parameters a and b or neither")
        if self.a is not None and (self.a <= 0 or self.b <= 0):
            raise NumericError("kernel parameters a, b must be positive")


def knn_graph(X, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors (self excluded), ties broken by index."""
    A = as_matrix(X, "umap input")
    n = A.shape[0]
    if k >= n:
        raise NumericError(f"n_neighbors={k} needs more than {n} points")
    dists = np.sqrt(pairwise_sq_dists(A))
    np.fill_diagonal(dists, np.inf)
    order = np.argsort(dists, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(dists, order, axis=1)


def smooth_knn(knn_dists: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Connectivity offsets rho and bisected bandwidths sigma per point."""
    n = knn_dists.shape[0]
    target = math.log2(k)
    rho = knn_dists[:, 0].copy()
    sigma = np.empty(n)
    for i in range(n):
        shifted = np.maximum(knn_dists[i] - rho[i], 0.0)
        lo, hi, mid = 0.0, math.inf, 1.0
        for _ in range(_SIGMA_STEPS):
            cardinality = float(np.exp(-shifted / mid).sum())
            if abs(cardinality - target) < _SIGMA_TOL:
                break
            if cardinality > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if math.isinf(hi) else (lo + hi) / 2.0
        sigma[i] = max(mid, _SIGMA_FLOOR)
    return rho, sigma


def fuzzy_graph(X, k: int) -> np.ndarray:
    """Symmetric membership matrix via the fuzzy union a + b - ab."""
    idx, dists = knn_graph(X, k)
    n = idx.shape[0]
    rho, sigma = smooth_knn(dists, k)
    directed = np.zeros((n, n))
    for i in range(n):
        directed[i, idx[i]] = np.exp(-np.maximum(dists[i] - rho[i], 0.0) / sigma[i])
    return directed + directed.T - directed * directed.T


def min_dist_curve(xs: np.ndarray, min_dist: float, spread: float = 1.0) -> np.ndarray:
    """Target membership-vs-distance curve the (a, b) kernel is fitted to."""
    ys = np.ones_like(xs)
    tail = xs >= min_dist
    ys[tail] = np.exp(-(xs[tail] - min_dist) / spread)
    return ys


def fit_ab(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares fit of (1 + a d^(2b))^-1 to the min_dist curve.

    Gauss-Newton with a small Levenberg damping from (a, b) = (1, 1); the
    grid matches the conventional 300 points over [0, 3 * spread].
    """
    xs = np.linspace(0.0, spread * 3.0, 300)
    ys = min_dist_curve(xs, min_dist, spread)
    a, b = 1.0, 1.0
    damping = 1e-4
    for _ in range(200):
        powed = np.power(xs, 2.0 * b, where=xs > 0, out=np.zeros_like(xs))
        f = 1.0 / (1.0 + a * powed)
        residual = ys - f
        d_a = -powed * f * f
        with np.errstate(divide="ignore"):
            logx = np.where(xs > 0, np.log(xs), 0.0)
        d_b = -2.0 * a * logx * powed * f * f
        J = np.stack([d_a, d_b], axis=1)
        g = J.T @ residual
        H = J.T @ J + damping * np.eye(2)
        step = solve_linear(H, g)
        a_new, b_new = a + float(step[0]), b + float(step[1])
        if a_new <= 0 or b_new <= 0:
            damping *= 10.0
            continue
        a, b = a_new, b_new
        if float(np.max(np.abs(step))) < 1e-12:
            break
    return a, b


def umap_embed(
    X, cfg: UmapConfig, rng: SeededRng, backend: str | None = None
) -> np.ndarray:
    """Embed rows of X into cfg.out_dims dimensions."""
    cfg.validate()
    A = as_matrix(X, "umap input")
    n = A.shape[0]
    if n <= cfg.n_neighbors:
        raise NumericError(f"{n} points but n_neighbors={cfg.n_neighbors}")

    weights = fuzzy_graph(A, cfg.n_neighbors)
    head_idx, tail_idx = np.nonzero(weights)
    w = weights[head_idx, tail_idx]
    max_w = float(w.max()) if w.size else 0.0
    if max_w <= 0.0:
        raise NumericError("empty fuzzy graph")
    epochs_per_sample = max_w / w

    if cfg.a is not None:
        a, b = float(cfg.a), float(cfg.b)
    else:
        a, b = fit_ab(cfg.min_dist)

    draws = np.array(rng.uniforms(n * cfg.out_dims), dtype=np.float64)
    Y = np.ascontiguousarray(draws.reshape(n, cfg.out_dims) * 20.0 - 10.0)

    _kernels.umap_optimize(
        Y,
        np.ascontiguousarray(head_idx, dtype=np.int64),
        np.ascontiguousarray(tail_idx, dtype=np.int64),
        np.ascontiguousarray(epochs_per_sample, dtype=np.float64),
        a,
        b,
        rng,
        cfg.epochs,
        _INITIAL_ALPHA,
        cfg.negative_samples,
        _REPULSION,
        backend=backend,
    )
    return Y
