"""Numpy / pure-Python implementations of the hot embedding kernels.

This backend is the import-time fallback when the compiled extension is
unavailable. The t-SNE step is vectorized numpy; the UMAP optimizer is a
scalar loop that performs the exact same arithmetic, in the same order, as
the compiled kernel so the two backends produce identical embeddings.
"""

from __future__ import annotations

import math

import numpy as np

_CLIP = 4.0


def tsne_step(P, Y, dY, scratch, exaggeration: float, compute_kl: bool) -> float:
    """One exact t-SNE gradient evaluation.

    Writes the gradient of the KL objective into ``dY`` (using ``scratch``
    as the n x n work buffer) and returns the KL divergence against the
    unexaggerated ``P`` when requested, else NaN.
    """
    sq = np.einsum("ij,ij->i", Y, Y)
    D = scratch
    np.matmul(Y, Y.T, out=D)
    D *= -2.0
    D += sq[:, None]
    D += sq[None, :]
    np.maximum(D, 0.0, out=D)
    D += 1.0
    np.reciprocal(D, out=D)  # now the Student-t numerator (1 + d^2)^-1
    np.fill_diagonal(D, 0.0)
    sumnum = float(D.sum())

    W = (exaggeration * P - D / sumnum) * D
    dY[:] = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)

    if not compute_kl:
        return float("nan")
    mask = P > 0.0
    p = P[mask]
    q = D[mask] / sumnum
    return float(np.sum(p * (np.log(p) - np.log(q))))


def umap_optimize(
    Y,
    head,
    tail,
    epochs_per_sample,
    a: float,
    b: float,
    rng,
    n_epochs: int,
    initial_alpha: float,
    negative_samples: int,
    repulsion: float,
) -> None:
    """Per-edge stochastic gradient optimization of a UMAP layout, in place.

    Directed edges fire on the usual epochs-per-sample schedule; each firing
    applies one attractive update to both endpoints and ``negative_samples``
    repulsive updates to the head against uniformly drawn points. The step
    size decays linearly to zero. All randomness comes from ``rng`` (one
    ``next_u64() % n`` draw per negative sample).
    """
    n, dim = Y.shape
    n_edges = len(head)
    next_fire = [float(epochs_per_sample[k]) for k in range(n_edges)]
    eps = [float(epochs_per_sample[k]) for k in range(n_edges)]
    heads = [int(h) for h in head]
    tails = [int(t) for t in tail]
    Yl = [[float(Y[i, k]) for k in range(dim)] for i in range(n)]
    next_u64 = rng.next_u64

    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        for k in range(n_edges):
            if next_fire[k] > epoch:
                continue
            next_fire[k] += eps[k]
            i = heads[k]
            j = tails[k]
            yi = Yl[i]
            yj = Yl[j]
            d2 = 0.0
            for c in range(dim):
                diff = yi[c] - yj[c]
                d2 += diff * diff
            if d2 > 0.0:
                coeff = (-2.0 * a * b * math.pow(d2, b - 1.0)) / (
                    a * math.pow(d2, b) + 1.0
                )
            else:
                coeff = 0.0
            for c in range(dim):
                g = coeff * (yi[c] - yj[c])
                if g > _CLIP:
                    g = _CLIP
                elif g < -_CLIP:
                    g = -_CLIP
                yi[c] += alpha * g
                yj[c] -= alpha * g

            for _ in range(negative_samples):
                t = next_u64() % n
                if t == i:
                    continue
                yt = Yl[t]
                d2 = 0.0
                for c in range(dim):
                    diff = yi[c] - yt[c]
                    d2 += diff * diff
                if d2 > 0.0:
                    coeff = (2.0 * repulsion * b) / (
                        (0.001 + d2) * (a * math.pow(d2, b) + 1.0)
                    )
                    for c in range(dim):
                        g = coeff * (yi[c] - yt[c])
                        if g > _CLIP:
                            g = _CLIP
                        elif g < -_CLIP:
                            g = -_CLIP
                        yi[c] += alpha * g
                else:
                    for c in range(dim):
                        yi[c] += alpha * _CLIP

    for i in range(n):
        for k in range(dim):
            Y[i, k] = Yl[i][k]
