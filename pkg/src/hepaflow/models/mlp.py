"""One-hidden-layer perceptron: ReLU units, logistic output, minibatch
gradient descent with momentum.

Weights use Glorot-style uniform initialization drawn from the model's
seeded stream (first layer row-major, then the output layer; biases zero);
each epoch reshuffles with one Fisher-Yates permutation, and the trailing
partial batch is kept. Gradients are batch means.

``loss_and_grads`` exposes the analytic gradient for finite-difference
verification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import SeededRng
from .base import TrainedClassifier, check_training_data

_EPS = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class MlpParams:
    w1: np.ndarray  # m x h
    b1: np.ndarray  # h
    w2: np.ndarray  # h
    b2: float

    def copy(self) -> "MlpParams":
        return MlpParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2)


def glorot_init(n_in: int, n_hidden: int, rng: SeededRng) -> MlpParams:
    limit1 = np.sqrt(6.0 / (n_in + n_hidden))
    w1 = (np.array(rng.uniforms(n_in * n_hidden)).reshape(n_in, n_hidden) * 2.0 - 1.0) * limit1
    limit2 = np.sqrt(6.0 / (n_hidden + 1))
    w2 = (np.array(rng.uniforms(n_hidden)) * 2.0 - 1.0) * limit2
    return MlpParams(w1=w1, b1=np.zeros(n_hidden), w2=w2, b2=0.0)


def forward(params: MlpParams, X: np.ndarray) -> np.ndarray:
    hidden = np.maximum(X @ params.w1 + params.b1, 0.0)
    return _sigmoid(hidden @ params.w2 + params.b2)


def loss_and_grads(params: MlpParams, X: np.ndarray, y: np.ndarray) -> tuple[float, MlpParams]:
    """Mean log-loss and its analytic gradient for one batch."""
    n = X.shape[0]
    z1 = X @ params.w1 + params.b1
    hidden = np.maximum(z1, 0.0)
    p = _sigmoid(hidden @ params.w2 + params.b2)
    clipped = np.clip(p, _EPS, 1.0 - _EPS)
    loss = float(-np.mean(y * np.log(clipped) + (1.0 - y) * np.log(1.0 - clipped)))

    delta_out = (p - y) / n
    grad_w2 = hidden.T @ delta_out
    grad_b2 = float(delta_out.sum())
    delta_hidden = np.outer(delta_out, params.w2)
    delta_hidden[z1 <= 0.0] = 0.0
    grad_w1 = X.T @ delta_hidden
    grad_b1 = delta_hidden.sum(axis=0)
    return loss, MlpParams(w1=grad_w1, b1=grad_b1, w2=grad_w2, b2=grad_b2)


@dataclass
class MlpModel:
    params: MlpParams

    def positive_probability(self, X: np.ndarray) -> np.ndarray:
        return forward(self.params, X)


def train_mlp(
    X,
    y,
    *,
    hidden_units: int,
    batch_size: int,
    momentum: float,
    learning_rate: float,
    epochs: int,
    seed: int,
) -> TrainedClassifier:
    A, labels = check_training_data(X, y)
    n, m = A.shape
    target = labels.astype(np.float64)
    rng = SeededRng(seed)
    params = glorot_init(m, int(hidden_units), rng)
    velocity = MlpParams(
        np.zeros_like(params.w1), np.zeros_like(params.b1), np.zeros_like(params.w2), 0.0
    )
    batch = int(batch_size)
    trace = []
    for _ in range(int(epochs)):
        perm = np.asarray(rng.permutation(n), dtype=np.int64)
        epoch_loss = 0.0
        for start in range(0, n, batch):
            rows = perm[start : start + batch]
            loss, grads = loss_and_grads(params, A[rows], target[rows])
            epoch_loss += loss * len(rows)
            velocity.w1 = momentum * velocity.w1 - learning_rate * grads.w1
            velocity.b1 = momentum * velocity.b1 - learning_rate * grads.b1
            velocity.w2 = momentum * velocity.w2 - learning_rate * grads.w2
            velocity.b2 = momentum * velocity.b2 - learning_rate * grads.b2
            params.w1 += velocity.w1
            params.b1 += velocity.b1
            params.w2 += velocity.w2
            params.b2 += velocity.b2
        trace.append(epoch_loss / n)
    return TrainedClassifier(
        kind="mlp",
        model=MlpModel(params=params),
        n_features=m,
        loss_trace=trace,
        epochs_run=int(epochs),
    )
