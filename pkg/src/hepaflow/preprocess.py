"""Preprocessing stages: imputation, oversampling, synthetic data,
concatenation, and IQR outlier replacement.

Stage order in the pipeline is fixed: impute -> oversample (clinical data
only) -> simulate -> concatenate -> replace outliers. Outlier replacement
deliberately precedes every reduction stage because the embedding methods
downstream are sensitive to extreme values.

Every function that needs randomness takes a :class:`SeededRng`; fit-like
statistics (imputation fill value, IQR bounds) are exposed separately from
their application so the leakage-free pipeline mode can fit them on
training rows only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError, NumericError
from .numerics import SeededRng, quantile

AG_COLUMN = "A/G"
ALB_COLUMN = "ALB"


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of the simulated binary-classification dataset.

    ``seed`` drives the standalone ``simulate`` command; inside a pipeline
    run the generator stream is derived from the master seed instead.
    """

    n_samples: int = 1000
    n_informative: int = 5
    n_redundant: int = 2
    n_repeated: int = 2
    class_sep: float = 1.0
    seed: int = 42

    @property
    def n_features(self) -> int:
        return self.n_informative + self.n_redundant + self.n_repeated

    def validate(self) -> None:
        counts = (self.n_samples, self.n_informative, self.n_redundant, self.n_repeated)
        if any(c < 0 for c in counts):
            raise DataError(f"synthetic counts must be >= 0, got {counts}")
        if self.n_samples < 2:
            raise DataError("synthetic dataset needs at least 2 samples")
        if self.n_informative == 0 and self.n_redundant > 0:
            raise DataError("redundant features require at least one informative feature")
        if self.n_repeated > 0 and self.n_informative + self.n_redundant == 0:
            raise DataError("repeated features require source columns")


@dataclass(frozen=True)
class IqrBounds:
    """Per-column quartiles and outlier fences (lower = Q1 - k*IQR, upper =
    Q3 + k*IQR)."""

    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    iqr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    k: float


def _ag_index(d: Dataset) -> int:
    try:
        return d.feature_names.index(AG_COLUMN)
    except ValueError:
        raise DataError(f"dataset has no {AG_COLUMN!r} column") from None


def _check_missing_only_ag(d: Dataset) -> int:
    ag = _ag_index(d)
    nan_mask = np.isnan(d.features)
    for c in range(d.n_features):
        if c != ag and nan_mask[:, c].any():
            rows = np.flatnonzero(nan_mask[:, c])[:3]
            raise DataError(
                f"missing values outside {AG_COLUMN!r}: column "
                f"{d.feature_names[c]!r}, rows {rows.tolist()}"
            )
    return ag


def ag_fill_value(d: Dataset, strategy: str) -> float:
    """Imputation fill value for missing A/G cells.

    ``faithful`` fills with the mean of the ALB column (the published
    procedure); ``column_median`` fills with the median of the observed A/G
    values.
    """
    if strategy == "faithful":
        alb = d.features[:, d.feature_names.index(ALB_COLUMN)]
        if np.isnan(alb).any():
            raise DataError(f"{ALB_COLUMN!r} column contains missing values")
        return float(alb.mean())
    if strategy == "column_median":
        ag = d.features[:, _ag_index(d)]
        observed = ag[~np.isnan(ag)]
        if observed.size == 0:
            raise DataError(f"no observed {AG_COLUMN!r} values to take a median of")
        return quantile(observed, 0.5)
    raise DataError(f"unknown imputation strategy {strategy!r}")


def impute_ag(d: Dataset, strategy: str = "faithful", fill_value: float | None = None) -> Dataset:
    """Fill missing A/G cells; every other cell is left bit-identical.

    Pass ``fill_value`` to apply a value fitted elsewhere (e.g. on training
    rows only); otherwise it is computed from ``d`` per ``strategy``.
    """
    ag = _check_missing_only_ag(d)
    out = d.copy()
    mask = np.isnan(out.features[:, ag])
    if not mask.any():
        return out
    value = ag_fill_value(d, strategy) if fill_value is None else float(fill_value)
    out.features[mask, ag] = value
    return out


def random_oversample(d: Dataset, rng: SeededRng, target: int | None = None) -> Dataset:
    """Balance classes by duplicating rows uniformly at random.

    With the default target (the majority count) only minority rows are
    duplicated. A larger explicit ``target`` duplicates rows of both classes
    up to that per-class count. Original rows keep their order; duplicates
    are appended (class 0 copies first, then class 1).
    """
    zeros = np.flatnonzero(d.labels == 0)
    ones = np.flatnonzero(d.labels == 1)
    if len(zeros) == 0 or len(ones) == 0:
        raise DataError("oversampling requires both classes present")
    goal = max(len(zeros), len(ones)) if target is None else int(target)
    if goal < max(len(zeros), len(ones)):
        raise DataError(f"oversample target {goal} below majority count")
    extra = []
    for class_rows in (zeros, ones):
        for _ in range(goal - len(class_rows)):
            extra.append(int(class_rows[rng.below(len(class_rows))]))
    if not extra:
        return d.copy()
    idx = np.concatenate([np.arange(d.n_rows), np.asarray(extra, dtype=np.int64)])
    return d.take(idx)


def generate_synthetic(spec: SyntheticSpec, rng: SeededRng) -> Dataset:
    """Simulate a balanced binary dataset: informative Gaussian blocks at
    -/+ class_sep, redundant mixtures of them, and exact repeated columns.

    Draw order (fixed for reproducibility): informative normals row-major,
    then the mixing matrix row-major, then one source draw per repeated
    column. Labels are blocked: class 0 rows first (the larger half for odd
    sizes), then class 1.
    """
    spec.validate()
    n = spec.n_samples
    n_zero = n - n // 2
    labels = np.concatenate([np.zeros(n_zero, dtype=np.int64), np.ones(n // 2, dtype=np.int64)])

    if spec.n_informative:
        info = np.array(rng.normals(n * spec.n_informative), dtype=np.float64)
        info = info.reshape(n, spec.n_informative)
        info += np.where(labels[:, None] == 1, spec.class_sep, -spec.class_sep)
    else:
        info = np.empty((n, 0), dtype=np.float64)

    blocks = [info]
    if spec.n_redundant:
        mixing = np.array(
            rng.uniforms(spec.n_informative * spec.n_redundant), dtype=np.float64
        ).reshape(spec.n_informative, spec.n_redundant)
        mixing = mixing * 2.0 - 1.0
        blocks.append(info @ mixing)
    current = np.hstack(blocks)
    for t in range(spec.n_repeated):
        source = rng.below(current.shape[1])
        current = np.hstack([current, current[:, source : source + 1]])

    names = [f"f{i}" for i in range(spec.n_features)]
    return Dataset(current, labels, names)


def concatenate(a: Dataset, b: Dataset) -> Dataset:
    """Vertically stack two datasets (rows of ``a`` first).

    Columns are aligned positionally; the result keeps the first non-empty
    dataset's feature names.
    """
    if a.n_rows == 0:
        return b.copy()
    if b.n_rows == 0:
        return a.copy()
    if a.n_features != b.n_features:
        raise DataError(
            f"cannot concatenate {a.n_features}-wide with {b.n_features}-wide dataset"
        )
    return Dataset(
        np.vstack([a.features, b.features]),
        np.concatenate([a.labels, b.labels]),
        list(a.feature_names),
    )


def iqr_bounds(column, k: float = 1.5) -> IqrBounds:
    """Quartiles and outlier fences for one column."""
    col = np.asarray(column, dtype=np.float64).ravel()
    if col.size == 0:
        raise NumericError("iqr_bounds of empty column")
    q1 = quantile(col, 0.25)
    q2 = quantile(col, 0.5)
    q3 = quantile(col, 0.75)
    iqr = q3 - q1
    return IqrBounds(
        q1=np.asarray([q1]),
        q2=np.asarray([q2]),
        q3=np.asarray([q3]),
        iqr=np.asarray([iqr]),
        lower=np.asarray([q1 - k * iqr]),
        upper=np.asarray([q3 + k * iqr]),
        k=k,
    )


def fit_iqr_bounds(d: Dataset, k: float = 1.5) -> IqrBounds:
    """Per-column fences over a whole dataset."""
    if d.n_rows == 0:
        raise NumericError("cannot fit IQR bounds on an empty dataset")
    if np.isnan(d.features).any():
        raise DataError("IQR replacement requires a fully imputed dataset")
    per_col = [iqr_bounds(d.features[:, c], k) for c in range(d.n_features)]
    return IqrBounds(
        q1=np.concatenate([b.q1 for b in per_col]),
        q2=np.concatenate([b.q2 for b in per_col]),
        q3=np.concatenate([b.q3 for b in per_col]),
        iqr=np.concatenate([b.iqr for b in per_col]),
        lower=np.concatenate([b.lower for b in per_col]),
        upper=np.concatenate([b.upper for b in per_col]),
        k=k,
    )


def apply_iqr_replace(d: Dataset, bounds: IqrBounds) -> tuple[Dataset, list[int]]:
    """Replace cells outside the fences by that column's Q2 (median)."""
    if bounds.lower.shape[0] != d.n_features:
        raise DataError(
            f"bounds cover {bounds.lower.shape[0]} columns, dataset has {d.n_features}"
        )
    out = d.copy()
    counts = []
    for c in range(d.n_features):
        col = out.features[:, c]
        mask = (col < bounds.lower[c]) | (col > bounds.upper[c])
        col[mask] = bounds.q2[c]
        counts.append(int(mask.sum()))
    return out, counts


def iqr_replace(d: Dataset, k: float = 1.5) -> tuple[Dataset, list[int]]:
    """Fit fences on ``d`` and replace its outliers by column medians."""
    return apply_iqr_replace(d, fit_iqr_bounds(d, k))
