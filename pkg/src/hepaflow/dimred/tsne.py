"""Exact (O(n^2)) t-SNE.

High-dimensional affinities use per-point Gaussian kernels whose bandwidths
are bisected until each conditional distribution's perplexity (2^entropy)
matches the target; the symmetrized joint matrix P feeds a Student-t (one
degree of freedom) low-dimensional model optimized by gradient descent with
momentum, early exaggeration, and per-iteration recentering -- the
published recipe, with the gradient evaluated by the selected kernel
backend. The KL divergence against the unexaggerated P is recorded every
tenth iteration and once more after the final update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import NumericError
from ..numerics import SeededRng, as_matrix, pairwise_sq_dists

_ENTROPY_TOL = 1e-7  # bits; comfortably inside the 1e-4 perplexity contract
_MAX_BISECTIONS = 200
_INIT_STD = 1e-4
_KL_EVERY = 10


@dataclass(frozen=True)
class TsneConfig:
    out_dims: int = 3
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250

    def validate(self) -> None:
        if self.out_dims < 1:
            raise NumericError("t-SNE needs out_dims >= 1")
        if self.perplexity <= 1:
            raise NumericError("perplexity must exceed 1")
        if self.iterations < 1:
            raise NumericError("iterations must be >= 1")


def _row_entropy_bits(neg_sq_dists: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Shannon entropy (bits) and unnormalized kernel row at bandwidth beta."""
    kernel = np.exp(neg_sq_dists * beta)
    total = float(kernel.sum())
    if total <= 0.0:
        return 0.0, kernel
    # H_nats = ln(total) + beta * sum(d * k) / total, with d = -neg_sq_dists
    h_nats = math.log(total) - beta * float(np.dot(neg_sq_dists, kernel)) / total
    return h_nats / math.log(2.0), kernel


def conditional_probabilities(
    sq_dists: np.ndarray, perplexity: float
) -> tuple[np.ndarray, np.ndarray]:
    """Row-calibrated conditional affinities p_{j|i} and the bandwidths beta.

    Each row's beta (1 / (2 sigma_i^2)) is bisected until 2^entropy matches
    the perplexity within tolerance.
    """
    n = sq_dists.shape[0]
    target_bits = math.log2(perplexity)
    P = np.zeros((n, n))
    betas = np.ones(n)
    for i in range(n):
        neg = -np.delete(sq_dists[i], i)
        beta, lo, hi = 1.0, 0.0, math.inf
        bits, kernel = _row_entropy_bits(neg, beta)
        for _ in range(_MAX_BISECTIONS):
            if abs(bits - target_bits) < _ENTROPY_TOL:
                break
            if bits > target_bits:  # too flat -> narrow the kernel
                lo = beta
                beta = beta * 2.0 if math.isinf(hi) else (lo + hi) / 2.0
            else:
                hi = beta
                beta = (lo + hi) / 2.0
            bits, kernel = _row_entropy_bits(neg, beta)
        total = float(kernel.sum())
        if total <= 0.0:
            raise NumericError(f"perplexity calibration failed for point {i}")
        row = kernel / total
        P[i, :i] = row[:i]
        P[i, i + 1 :] = row[i:]
        betas[i] = beta
    return P, betas


def joint_probabilities(X, perplexity: float) -> np.ndarray:
    """Symmetrized affinities P = (P_cond + P_cond^T) / (2n); sums to 1."""
    A = as_matrix(X, "t-SNE input")
    n = A.shape[0]
    if not perplexity < (n - 1) / 3:
        raise NumericError(
            f"perplexity {perplexity} infeasible for {n} points (needs < (n-1)/3)"
        )
    cond, _ = conditional_probabilities(pairwise_sq_dists(A), perplexity)
    return (cond + cond.T) / (2.0 * n)


def tsne_embed(
    X, cfg: TsneConfig, rng: SeededRng, backend: str | None = None
) -> tuple[np.ndarray, list[float]]:
    """Embed rows of X; returns (n x out_dims layout, KL trace)."""
    cfg.validate()
    A = as_matrix(X, "t-SNE input")
    n = A.shape[0]
    P = joint_probabilities(A, cfg.perplexity)

    draws = np.array(rng.normals(n * cfg.out_dims), dtype=np.float64)
    Y = np.ascontiguousarray(draws.reshape(n, cfg.out_dims) * _INIT_STD)
    update = np.zeros_like(Y)
    dY = np.zeros_like(Y)
    scratch = np.zeros((n, n))

    trace: list[float] = []
    for it in range(cfg.iterations):
        exaggeration = cfg.early_exaggeration if it < cfg.exaggeration_iters else 1.0
        momentum = cfg.momentum_start if it < cfg.momentum_switch else cfg.momentum_final
        want_kl = it % _KL_EVERY == 0
        kl = _kernels.tsne_step(P, Y, dY, scratch, exaggeration, want_kl, backend=backend)
        if want_kl:
            trace.append(float(kl))
        update *= momentum
        update -= cfg.learning_rate * dY
        Y += update
        Y -= Y.mean(axis=0)

    final_kl = _kernels.tsne_step(P, Y, dY, scratch, 1.0, True, backend=backend)
    trace.append(float(final_kl))
    return Y, trace
