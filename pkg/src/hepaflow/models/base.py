"""Shared classifier interface: specs, trained-model wrapper, defaults.

Every hyperparameter default is pinned here; the source publication names
the four algorithms but no settings, so these follow widespread
conventions and are part of this artifact's contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import ConfigError, NumericError
from ..numerics import as_matrix

KINDS = ("logistic_regression", "knn", "random_forest", "mlp")

DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "logistic_regression": {"learning_rate": 0.1, "epochs": 1000, "l2": 0.0},
    "knn": {"k": 5},
    "random_forest": {"n_trees": 100, "min_samples_split": 2},
    "mlp": {
        "hidden_units": 100,
        "batch_size": 32,
        "momentum": 0.9,
        "learning_rate": 1e-3,
        "epochs": 200,
    },
}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def resolved_params(self) -> dict[str, Any]:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown classifier kind {self.kind!r}; choose from {KINDS}")
        defaults = dict(DEFAULT_PARAMS[self.kind])
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown hyperparameters for {self.kind}: {sorted(unknown)}"
            )
        defaults.update(self.params)
        for name, value in defaults.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{self.kind}.{name} must be numeric, got {value!r}")
            if value <= 0 and name not in ("l2",):
                raise ConfigError(f"{self.kind}.{name} must be positive, got {value}")
            if name == "l2" and value < 0:
                raise ConfigError(f"{self.kind}.l2 must be >= 0, got {value}")
        return defaults


@dataclass
class TrainedClassifier:
    kind: str
    model: Any
    n_features: int
    loss_trace: list[float] = field(default_factory=list)
    epochs_run: int = 0

    def predict_proba(self, X) -> np.ndarray:
        A = as_matrix(X, "prediction input")
        if A.shape[1] != self.n_features:
            raise NumericError(
                f"width {A.shape[1]} does not match training width {self.n_features}"
            )
        p1 = np.clip(self.model.positive_probability(A), 0.0, 1.0)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        # ties go to the positive class
        return (proba[:, 1] >= proba[:, 0]).astype(np.int64)


def check_training_data(X, y, *, require_both_classes: bool = True) -> tuple[np.ndarray, np.ndarray]:
    A = as_matrix(X, "training input")
    labels = np.asarray(y, dtype=np.int64)
    if labels.shape[0] != A.shape[0]:
        raise NumericError(f"{A.shape[0]} rows vs {labels.shape[0]} labels")
    if A.shape[0] < 2:
        raise NumericError("training needs at least two samples")
    if not np.isin(labels, (0, 1)).all():
        raise NumericError("labels must be 0/1")
    if require_both_classes and len(np.unique(labels)) < 2:
        raise NumericError("training needs both classes present")
    return A, labels
