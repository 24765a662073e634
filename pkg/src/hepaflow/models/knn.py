"""k-nearest-neighbors with Euclidean distance and stable tie-breaking.

Distance ties resolve toward the lower training index, so predictions are
independent of any internal ordering details.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from .base import TrainedClassifier, check_training_data


@dataclass
class KnnModel:
    train_X: np.ndarray
    train_y: np.ndarray
    k: int

    def positive_probability(self, X: np.ndarray) -> np.ndarray:
        sq = np.einsum("ij,ij->i", self.train_X, self.train_X)
        out = np.empty(X.shape[0])
        block = 512  # bounds the (block x n_train) distance buffer
        for start in range(0, X.shape[0], block):
            Q = X[start : start + block]
            d = sq[None, :] - 2.0 * (Q @ self.train_X.T)
            d += np.einsum("ij,ij->i", Q, Q)[:, None]
            nearest = np.argsort(d, axis=1, kind="stable")[:, : self.k]
            out[start : start + block] = self.train_y[nearest].mean(axis=1)
        return out


def train_knn(X, y, *, k: int) -> TrainedClassifier:
    A, labels = check_training_data(X, y, require_both_classes=False)
    k = int(k)
    if k > A.shape[0]:
        raise NumericError(f"k={k} exceeds {A.shape[0]} training rows")
    return TrainedClassifier(
        kind="knn",
        model=KnnModel(train_X=A.copy(), train_y=labels.astype(np.float64), k=k),
        n_features=A.shape[1],
    )
