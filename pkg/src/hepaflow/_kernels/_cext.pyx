# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: exact t-SNE gradient step and the UMAP edge optimizer.

The UMAP kernel embeds the same xoshiro256** generator as
``hepaflow.numerics.rng`` and consumes draws in the same order as the
pure-Python backend; compiled with ``-ffp-contract=off`` the two backends
produce bit-identical layouts.
"""

from libc.math cimport log, pow

import numpy as np


cdef inline unsigned long long _rotl64(unsigned long long x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline unsigned long long _next_u64(unsigned long long* s) nogil:
    cdef unsigned long long result = _rotl64(s[1] * 5ULL, 7) * 9ULL
    cdef unsigned long long t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl64(s[3], 45)
    return result


cdef inline double _clip4(double g) nogil:
    if g > 4.0:
        return 4.0
    if g < -4.0:
        return -4.0
    return g


def tsne_step(double[:, ::1] P, double[:, ::1] Y, double[:, ::1] dY,
              double[:, ::1] num, double exaggeration, bint compute_kl):
    """Gradient of the t-SNE objective into ``dY``; returns KL when asked."""
    cdef Py_ssize_t n = Y.shape[0]
    cdef Py_ssize_t d = Y.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dist, diff, q, w, pij
    cdef double sumnum = 0.0
    cdef double kl = 0.0

    with nogil:
        for i in range(n):
            num[i, i] = 0.0
            for j in range(i + 1, n):
                dist = 0.0
                for k in range(d):
                    diff = Y[i, k] - Y[j, k]
                    dist += diff * diff
                q = 1.0 / (1.0 + dist)
                num[i, j] = q
                num[j, i] = q
                sumnum += 2.0 * q

        for i in range(n):
            for k in range(d):
                dY[i, k] = 0.0

        for i in range(n):
            for j in range(i + 1, n):
                q = num[i, j]
                w = 4.0 * (exaggeration * P[i, j] - q / sumnum) * q
                for k in range(d):
                    diff = w * (Y[i, k] - Y[j, k])
                    dY[i, k] += diff
                    dY[j, k] -= diff
                if compute_kl:
                    pij = P[i, j]
                    if pij > 0.0:
                        kl += 2.0 * pij * log(pij * sumnum / q)

    if compute_kl:
        return kl
    return float("nan")


def umap_optimize(double[:, ::1] Y, long long[::1] head, long long[::1] tail,
                  double[::1] epochs_per_sample, double a, double b,
                  unsigned long long[::1] rng_state, int n_epochs,
                  double initial_alpha, int negative_samples, double repulsion):
    """Run the full UMAP layout optimization in place; advances rng_state."""
    cdef Py_ssize_t n = Y.shape[0]
    cdef Py_ssize_t dim = Y.shape[1]
    cdef Py_ssize_t n_edges = head.shape[0]
    cdef Py_ssize_t k, c, m
    cdef long long i, j, t
    cdef int epoch
    cdef double alpha, d2, diff, coeff, g
    cdef unsigned long long s[4]
    cdef double[::1] next_fire = np.array(epochs_per_sample, dtype=np.float64, copy=True)

    for k in range(4):
        s[k] = rng_state[k]

    with nogil:
        for epoch in range(n_epochs):
            alpha = initial_alpha * (1.0 - (<double> epoch) / (<double> n_epochs))
            for k in range(n_edges):
                if next_fire[k] > epoch:
                    continue
                next_fire[k] += epochs_per_sample[k]
                i = head[k]
                j = tail[k]
                d2 = 0.0
                for c in range(dim):
                    diff = Y[i, c] - Y[j, c]
                    d2 += diff * diff
                if d2 > 0.0:
                    coeff = (-2.0 * a * b * pow(d2, b - 1.0)) / (a * pow(d2, b) + 1.0)
                else:
                    coeff = 0.0
                for c in range(dim):
                    g = _clip4(coeff * (Y[i, c] - Y[j, c]))
                    Y[i, c] += alpha * g
                    Y[j, c] -= alpha * g

                for m in range(negative_samples):
                    t = <long long> (_next_u64(s) % (<unsigned long long> n))
                    if t == i:
                        continue
                    d2 = 0.0
                    for c in range(dim):
                        diff = Y[i, c] - Y[t, c]
                        d2 += diff * diff
                    if d2 > 0.0:
                        coeff = (2.0 * repulsion * b) / ((0.001 + d2) * (a * pow(d2, b) + 1.0))
                        for c in range(dim):
                            g = _clip4(coeff * (Y[i, c] - Y[t, c]))
                            Y[i, c] += alpha * g
                    else:
                        for c in range(dim):
                            Y[i, c] += alpha * 4.0

    for k in range(4):
        rng_state[k] = s[k]
