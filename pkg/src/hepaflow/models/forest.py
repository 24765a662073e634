"""Random forest built from scratch: bagged CART trees on Gini impurity.

Per tree: an n-of-n bootstrap from that tree's own substream, splits chosen
over midpoints of sorted distinct values, and a random feature order per
node of which the first floor(sqrt(m)) features are tried (the scan
continues down the order only while no valid split has been found, so a
tree never goes to a leaf merely because it drew constant features). Trees
grow to purity or below two samples, and each leaf votes its majority
class, ties toward the positive class.

Split comparison is exact: the weighted-Gini objective is reduced to
integer-valued numerators and denominators that are below 2^53, so the
float scores and their argmax are reproducible everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from ..numerics import SeededRng, derive_substream
from .base import TrainedClassifier, check_training_data


def gini_impurity(counts) -> float:
    """1 - sum((c_i / n)^2); zero for pure nodes."""
    c = np.asarray(counts, dtype=np.int64)
    if (c < 0).any():
        raise NumericError("class counts must be nonnegative")
    n = int(c.sum())
    if n == 0:
        raise NumericError("gini of empty counts")
    fractions = c / n
    return float(1.0 - np.dot(fractions, fractions))


@dataclass
class _Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    vote: np.ndarray

    def predict_votes(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            f = self.feature[node[rows]]
            go_left = X[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
            active = self.feature[node] >= 0
        return self.vote[node]


def _best_split(values: np.ndarray, ones: np.ndarray) -> tuple[float, float] | None:
    """Best (score, threshold) for one feature, or None if it is constant.

    Score is sum-of-squared-class-counts over node size, summed across both
    children; maximizing it minimizes the weighted Gini impurity.
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    boundaries = np.flatnonzero(v[:-1] < v[1:])
    if boundaries.size == 0:
        return None
    y_sorted = ones[order]
    n = v.shape[0]
    total_one = int(y_sorted.sum())

    cum_one = np.cumsum(y_sorted)[boundaries]
    n_left = (boundaries + 1).astype(np.int64)
    n_right = n - n_left
    one_left = cum_one.astype(np.int64)
    zero_left = n_left - one_left
    one_right = total_one - one_left
    zero_right = n_right - one_right

    numerator = (zero_left * zero_left + one_left * one_left) * n_right
    numerator += (zero_right * zero_right + one_right * one_right) * n_left
    score = numerator.astype(np.float64) / (n_left * n_right).astype(np.float64)
    best = int(np.argmax(score))
    cut = boundaries[best]
    return float(score[best]), float((v[cut] + v[cut + 1]) / 2.0)


def _grow_tree(X: np.ndarray, y: np.ndarray, rng: SeededRng, min_split: int) -> _Tree:
    m = X.shape[1]
    n_try = max(1, int(math.sqrt(m)))
    feature, threshold, left, right, vote = [], [], [], [], []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        vote.append(0)
        return len(feature) - 1

    root = new_node()
    stack = [(np.arange(X.shape[0]), root)]
    while stack:
        rows, node = stack.pop()
        labels = y[rows]
        ones = int(labels.sum())
        if ones == 0 or ones == len(rows) or len(rows) < min_split:
            vote[node] = 1 if 2 * ones >= len(rows) else 0
            continue

        order = rng.permutation(m)
        best = None
        best_feature = -1
        for rank, f in enumerate(order):
            if rank >= n_try and best is not None:
                break
            candidate = _best_split(X[rows, f], labels)
            if candidate is not None and (best is None or candidate[0] > best[0]):
                best = candidate
                best_feature = f
        if best is None:  # every feature constant on this node
            vote[node] = 1 if 2 * ones >= len(rows) else 0
            continue

        _, thr = best
        mask = X[rows, best_feature] <= thr
        feature[node] = best_feature
        threshold[node] = thr
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        stack.append((rows[~mask], right_id))
        stack.append((rows[mask], left_id))

    return _Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        vote=np.asarray(vote, dtype=np.float64),
    )


@dataclass
class ForestModel:
    trees: list[_Tree]
    bootstrap_unique_frac: list[float] = field(default_factory=list)

    def positive_probability(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(X.shape[0])
        for tree in self.trees:
            votes += tree.predict_votes(X)
        return votes / len(self.trees)


def train_forest(X, y, *, n_trees: int, min_samples_split: int, seed: int) -> TrainedClassifier:
    A, labels = check_training_data(X, y, require_both_classes=False)
    if A.shape[0] > 200_000:
        raise NumericError("forest split scoring assumes n <= 200000 for exact arithmetic")
    n = A.shape[0]
    master = SeededRng(seed)
    trees = []
    unique_fracs = []
    for t in range(int(n_trees)):
        tree_rng = derive_substream(master, t)
        boot = np.fromiter((tree_rng.below(n) for _ in range(n)), dtype=np.int64, count=n)
        unique_fracs.append(len(np.unique(boot)) / n)
        trees.append(_grow_tree(A[boot], labels[boot], tree_rng, int(min_samples_split)))
    return TrainedClassifier(
        kind="random_forest",
        model=ForestModel(trees=trees, bootstrap_unique_frac=unique_fracs),
        n_features=A.shape[1],
    )
