"""Splitting, cross-validation, and every metric and curve family.

Conventions pinned here:

* the positive class (label 1) is disease;
* ROC/AUC group tied scores into one threshold, which makes the
  trapezoidal area equal the pairwise rank statistic with half credit for
  ties;
* precision with no positive predictions is reported as NaN (an explicit
  undefined marker) and the F1 is then 0, so tables never silently carry
  a propagated NaN.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .numerics import SeededRng, derive_substream


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class MetricRow:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    brier: float
    runtime_seconds: float = 0.0


@dataclass
class CurveSeries:
    kind: str  # roc | pr | calibration | learning
    model: str
    points: list[tuple[float, float]] = field(default_factory=list)


def _check_labels(y) -> np.ndarray:
    labels = np.asarray(y, dtype=np.int64)
    if labels.ndim != 1:
        raise NumericError("labels must be 1-D")
    if labels.size and not np.isin(labels, (0, 1)).all():
        raise NumericError("labels must be 0/1")
    return labels


def stratified_split(
    y, test_fraction: float, rng: SeededRng
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, exhaustive train/test indices preserving class proportions.

    Per-class test counts are round(count * fraction); index sets come back
    sorted ascending.
    """
    labels = _check_labels(y)
    if not 0.0 < test_fraction < 1.0:
        raise NumericError(f"test fraction {test_fraction} outside (0, 1)")
    classes = np.unique(labels)
    if classes.size < 2:
        raise NumericError("stratified split needs both classes present")
    test_parts = []
    train_parts = []
    for cls in classes:
        rows = np.flatnonzero(labels == cls).tolist()
        rng.shuffle(rows)
        n_test = int(round(len(rows) * test_fraction))
        test_parts.extend(rows[:n_test])
        train_parts.extend(rows[n_test:])
    if not train_parts or not test_parts:
        raise NumericError("degenerate split: empty train or test partition")
    return np.sort(np.asarray(train_parts, dtype=np.int64)), np.sort(
        np.asarray(test_parts, dtype=np.int64)
    )


def stratified_kfold(y, k: int, rng: SeededRng) -> list[tuple[np.ndarray, np.ndarray]]:
    """k disjoint, exhaustive folds with per-class proportions within one
    sample of the global ratio."""
    labels = _check_labels(y)
    if k < 2:
        raise NumericError("k-fold needs k >= 2")
    classes = np.unique(labels)
    if classes.size < 2:
        raise NumericError("stratified folds need both classes present")
    fold_members: list[list[int]] = [[] for _ in range(k)]
    for cls in classes:
        rows = np.flatnonzero(labels == cls).tolist()
        if len(rows) < k:
            raise NumericError(f"class {cls} has {len(rows)} rows, fewer than k={k}")
        rng.shuffle(rows)
        base, remainder = divmod(len(rows), k)
        start = 0
        for fold in range(k):
            size = base + (1 if fold < remainder else 0)
            fold_members[fold].extend(rows[start : start + size])
            start += size
    pairs = []
    all_idx = np.arange(labels.size)
    for fold in range(k):
        val = np.sort(np.asarray(fold_members[fold], dtype=np.int64))
        mask = np.ones(labels.size, dtype=bool)
        mask[val] = False
        pairs.append((all_idx[mask], val))
    return pairs


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t = _check_labels(y_true)
    p = _check_labels(y_pred)
    if t.shape != p.shape:
        raise NumericError(f"length mismatch: {t.shape[0]} vs {p.shape[0]}")
    return ConfusionMatrix(
        tp=int(((t == 1) & (p == 1)).sum()),
        fp=int(((t == 0) & (p == 1)).sum()),
        tn=int(((t == 0) & (p == 0)).sum()),
        fn=int(((t == 1) & (p == 0)).sum()),
    )


def basic_metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """(accuracy, precision, recall, f1); undefined ratios are NaN, F1 then 0."""
    if cm.total == 0:
        raise NumericError("metrics of an empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else math.nan
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else math.nan
    if math.isnan(precision) or math.isnan(recall) or precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return accuracy, precision, recall, f1


def _score_groups(y_true, scores) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct scores descending with per-threshold positive/negative counts."""
    t = _check_labels(y_true)
    s = np.asarray(scores, dtype=np.float64)
    if t.shape != s.shape:
        raise NumericError("labels and scores length mismatch")
    if np.isnan(s).any():
        raise NumericError("scores contain NaN")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    t_sorted = t[order]
    boundaries = np.flatnonzero(np.diff(s_sorted)) if s.size > 1 else np.array([], dtype=np.int64)
    ends = np.concatenate([boundaries, [s.size - 1]])
    cum_pos = np.cumsum(t_sorted)[ends]
    cum_all = ends + 1
    return s_sorted[ends], cum_pos, cum_all - cum_pos


def roc_curve(y_true, scores, model: str = "") -> CurveSeries:
    """ROC points from (0,0) to (1,1), tied scores grouped."""
    t = _check_labels(y_true)
    n_pos = int(t.sum())
    n_neg = t.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise NumericError("ROC needs both classes present")
    _, cum_pos, cum_neg = _score_groups(y_true, scores)
    points = [(0.0, 0.0)]
    points += [(fp / n_neg, tp / n_pos) for tp, fp in zip(cum_pos, cum_neg)]
    return CurveSeries(kind="roc", model=model, points=points)


def auc(series: CurveSeries) -> float:
    """Trapezoidal area under an x-sorted curve."""
    pts = series.points
    if len(pts) < 2:
        raise NumericError("AUC needs at least two points")
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def pr_curve(y_true, scores, model: str = "") -> CurveSeries:
    """(recall, precision) at each distinct threshold, recall ascending."""
    t = _check_labels(y_true)
    n_pos = int(t.sum())
    if n_pos == 0:
        raise NumericError("PR curve needs positive samples")
    _, cum_pos, cum_neg = _score_groups(y_true, scores)
    points = [
        (tp / n_pos, tp / (tp + fp) if tp + fp else math.nan)
        for tp, fp in zip(cum_pos, cum_neg)
    ]
    return CurveSeries(kind="pr", model=model, points=points)


def brier(y_true, p_positive) -> float:
    t = _check_labels(y_true)
    p = np.asarray(p_positive, dtype=np.float64)
    if t.shape != p.shape:
        raise NumericError("labels and probabilities length mismatch")
    if p.size == 0:
        raise NumericError("Brier score of empty input")
    if ((p < 0.0) | (p > 1.0) | np.isnan(p)).any():
        raise NumericError("probabilities outside [0, 1]")
    return float(np.mean((p - t) ** 2))


def calibration_bins(y_true, p_positive, bins: int = 10, model: str = "") -> CurveSeries:
    """Equal-width reliability bins: (mean predicted, observed frequency).

    p = 1.0 lands in the last bin; empty bins are omitted.
    """
    if bins < 2:
        raise NumericError("calibration needs at least 2 bins")
    t = _check_labels(y_true)
    p = np.asarray(p_positive, dtype=np.float64)
    if ((p < 0.0) | (p > 1.0) | np.isnan(p)).any():
        raise NumericError("probabilities outside [0, 1]")
    idx = np.minimum((p * bins).astype(np.int64), bins - 1)
    points = []
    for b in range(bins):
        mask = idx == b
        if mask.any():
            points.append((float(p[mask].mean()), float(t[mask].mean())))
    return CurveSeries(kind="calibration", model=model, points=points)


@dataclass
class IsotonicModel:
    """Nondecreasing step function fitted by pool-adjacent-violators."""

    thresholds: np.ndarray  # first predictor value of each block, ascending
    values: np.ndarray  # block means, nondecreasing

    def apply(self, p) -> np.ndarray:
        q = np.asarray(p, dtype=np.float64)
        slot = np.searchsorted(self.thresholds, q, side="right") - 1
        return self.values[np.clip(slot, 0, len(self.values) - 1)]


def isotonic_fit(p, y) -> IsotonicModel:
    """Least-squares monotone fit of outcomes against predictor values.

    Duplicate predictor values are pooled first so the result is a function
    of p; applying the fit to its own inputs never increases the Brier
    score.
    """
    q = np.asarray(p, dtype=np.float64)
    t = np.asarray(y, dtype=np.float64)
    if q.size == 0:
        raise NumericError("isotonic fit of empty input")
    if q.shape != t.shape:
        raise NumericError("predictor and outcome length mismatch")
    order = np.argsort(q, kind="stable")
    q_sorted = q[order]
    t_sorted = t[order]

    # one block per distinct predictor value
    starts = np.concatenate([[0], np.flatnonzero(np.diff(q_sorted)) + 1])
    ends = np.concatenate([starts[1:], [q_sorted.size]])
    xs = [float(q_sorted[s]) for s in starts]
    sums = [float(t_sorted[s:e].sum()) for s, e in zip(starts, ends)]
    weights = [float(e - s) for s, e in zip(starts, ends)]

    # pool adjacent violators
    block_x, block_sum, block_w = [], [], []
    for x, s, w in zip(xs, sums, weights):
        block_x.append(x)
        block_sum.append(s)
        block_w.append(w)
        while len(block_sum) > 1 and (
            block_sum[-2] * block_w[-1] >= block_sum[-1] * block_w[-2]
        ):
            s2 = block_sum.pop()
            w2 = block_w.pop()
            block_x.pop()
            block_sum[-1] += s2
            block_w[-1] += w2
    return IsotonicModel(
        thresholds=np.asarray(block_x),
        values=np.asarray([s / w for s, w in zip(block_sum, block_w)]),
    )


def stratified_prefix(fraction: float, orders: dict[int, list[int]]) -> np.ndarray:
    """Prefix of pre-shuffled per-class orders; sizes round(count * f)."""
    taken = []
    for rows in orders.values():
        take = int(round(len(rows) * fraction))
        taken.extend(rows[:take])
    return np.sort(np.asarray(taken, dtype=np.int64))


def learning_curve(
    spec,
    X,
    y,
    fractions,
    rng: SeededRng,
    *,
    protocol: str = "split",
    train_idx=None,
    test_idx=None,
    folds: int = 10,
    test_fraction: float = 0.25,
    model_name: str = "",
) -> tuple[CurveSeries, CurveSeries]:
    """Train/validation accuracy over stratified training prefixes.

    ``split`` validates each prefix model on the fixed held-out partition;
    ``cv`` runs a fresh k-fold on each prefix and averages fold accuracies.
    Fractions whose prefix loses a class are skipped with a warning.
    """
    from . import models  # local import to avoid a cycle

    labels = _check_labels(y)
    A = np.asarray(X, dtype=np.float64)
    fracs = list(fractions)
    if any(not 0.0 < f <= 1.0 for f in fracs):
        raise NumericError("learning-curve fractions must lie in (0, 1]")
    if sorted(fracs) != fracs:
        raise NumericError("learning-curve fractions must ascend")

    if protocol == "split":
        if train_idx is None or test_idx is None:
            train_idx, test_idx = stratified_split(labels, test_fraction, derive_substream(rng, 0))
        pool = np.asarray(train_idx, dtype=np.int64)
    elif protocol == "cv":
        pool = np.arange(labels.size)
    else:
        raise NumericError(f"unknown learning-curve protocol {protocol!r}")

    shuffle_rng = derive_substream(rng, 1)
    orders: dict[int, list[int]] = {}
    for cls in np.unique(labels[pool]):
        rows = pool[labels[pool] == cls].tolist()
        shuffle_rng.shuffle(rows)
        orders[int(cls)] = rows

    train_series = CurveSeries(kind="learning", model=model_name)
    val_series = CurveSeries(kind="learning", model=model_name)
    for f_idx, fraction in enumerate(fracs):
        prefix = stratified_prefix(fraction, orders)
        if len(np.unique(labels[prefix])) < 2:
            warnings.warn(f"fraction {fraction}: single-class prefix skipped", stacklevel=2)
            continue
        if protocol == "split":
            spec_f = type(spec)(
                kind=spec.kind, params=spec.params, seed=derive_substream(rng, 100 + f_idx).seed
            )
            model = models.train(spec_f, A[prefix], labels[prefix])
            train_score = float((model.predict(A[prefix]) == labels[prefix]).mean())
            val_score = float((model.predict(A[test_idx]) == labels[test_idx]).mean())
        else:
            fold_rng = derive_substream(rng, 200 + f_idx)
            train_scores, val_scores = [], []
            for fold_no, (tr, va) in enumerate(
                stratified_kfold(labels[prefix], folds, fold_rng)
            ):
                spec_f = type(spec)(
                    kind=spec.kind,
                    params=spec.params,
                    seed=derive_substream(fold_rng, fold_no).seed,
                )
                model = models.train(spec_f, A[prefix][tr], labels[prefix][tr])
                train_scores.append(float((model.predict(A[prefix][tr]) == labels[prefix][tr]).mean()))
                val_scores.append(float((model.predict(A[prefix][va]) == labels[prefix][va]).mean()))
            train_score = float(np.mean(train_scores))
            val_score = float(np.mean(val_scores))
        train_series.points.append((fraction, train_score))
        val_series.points.append((fraction, val_score))
    return train_series, val_series


def timed(op):
    """(result, wall seconds) on the monotonic clock."""
    start = time.perf_counter()
    result = op()
    return result, time.perf_counter() - start
