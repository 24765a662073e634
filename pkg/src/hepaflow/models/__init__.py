"""The four classifiers behind one train / predict-probability interface."""

from __future__ import annotations

import numpy as np

from .base import DEFAULT_PARAMS, KINDS, ClassifierSpec, TrainedClassifier
from .forest import gini_impurity, train_forest
from .knn import train_knn
from .logistic import train_logistic
from .mlp import train_mlp


def train(spec: ClassifierSpec, X, y) -> TrainedClassifier:
    """Train per the spec's kind; the spec's seed drives all randomness."""
    params = spec.resolved_params()
    if spec.kind == "logistic_regression":
        return train_logistic(
            X, y, learning_rate=params["learning_rate"], epochs=params["epochs"], l2=params["l2"]
        )
    if spec.kind == "knn":
        return train_knn(X, y, k=params["k"])
    if spec.kind == "random_forest":
        return train_forest(
            X,
            y,
            n_trees=params["n_trees"],
            min_samples_split=params["min_samples_split"],
            seed=spec.seed,
        )
    return train_mlp(
        X,
        y,
        hidden_units=params["hidden_units"],
        batch_size=params["batch_size"],
        momentum=params["momentum"],
        learning_rate=params["learning_rate"],
        epochs=params["epochs"],
        seed=spec.seed,
    )


def predict_proba(model: TrainedClassifier, X) -> np.ndarray:
    """n x 2 class probabilities; rows sum to 1."""
    return model.predict_proba(X)


def predict(model: TrainedClassifier, X) -> np.ndarray:
    """Argmax labels, ties toward the positive class."""
    return model.predict(X)


__all__ = [
    "DEFAULT_PARAMS",
    "KINDS",
    "ClassifierSpec",
    "TrainedClassifier",
    "gini_impurity",
    "predict",
    "predict_proba",
    "train",
]
