"""Logistic regression by full-batch gradient descent on the log-loss.

Zero-initialized weights plus an intercept; the gradient is averaged over
samples; optional L2 applies to the weights only. The per-epoch loss trace
is kept on the trained model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import TrainedClassifier, check_training_data

_EPS = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(p: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(p, _EPS, 1.0 - _EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


@dataclass
class LogisticModel:
    weights: np.ndarray  # m weights
    bias: float

    def positive_probability(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(X @ self.weights + self.bias)


def train_logistic(X, y, *, learning_rate: float, epochs: int, l2: float) -> TrainedClassifier:
    A, labels = check_training_data(X, y)
    n, m = A.shape
    w = np.zeros(m)
    b = 0.0
    target = labels.astype(np.float64)
    trace = []
    for _ in range(int(epochs)):
        p = _sigmoid(A @ w + b)
        trace.append(_log_loss(p, target))
        residual = p - target
        grad_w = A.T @ residual / n + l2 * w
        grad_b = float(residual.mean())
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
    trace.append(_log_loss(_sigmoid(A @ w + b), target))
    return TrainedClassifier(
        kind="logistic_regression",
        model=LogisticModel(weights=w, bias=b),
        n_features=m,
        loss_trace=trace,
        epochs_run=int(epochs),
    )
