"""Stagewise gradient boosting: regression trees fit to squared-error
residuals of {0,1} labels, summed with a learning rate (L2Boost).

Raw scores are clamped to [0, 1] and reported as probabilities, which is
cruder than logistic-loss boosting but matches the additive-residual model
this package implements deliberately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .validation import check_binary_labels, check_matrix, check_n_features

LEAF = -1


@dataclass
class RegressionTree:
    """Flat-array binary tree; a row goes left when x[feature] <= threshold.

    ``feature[i] == -1`` marks node i as a leaf with prediction ``value[i]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    max_depth: int

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i, row in enumerate(X):
            node = 0
            while self.feature[node] != LEAF:
                if row[self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[i] = self.value[node]
        return out


class _TreeBuilder:
    def __init__(self, max_depth: int, min_samples_leaf: int):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _new_node(self) -> int:
        self.feature.append(LEAF)
        self.threshold.append(np.nan)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(np.nan)
        return len(self.feature) - 1

    def build(self, X: np.ndarray, r: np.ndarray, node: int, depth: int) -> None:
        self.value[node] = float(r.mean())
        if depth >= self.max_depth or r.size < 2 * self.min_samples_leaf:
            return
        if np.all(r == r[0]):
            return
        split = _best_split(X, r, self.min_samples_leaf)
        if split is None:
            return
        j, thr = split
        mask = X[:, j] <= thr
        if not mask.any() or mask.all():
            return
        self.feature[node] = j
        self.threshold[node] = thr
        self.left[node] = self._new_node()
        self.right[node] = self._new_node()
        self.build(X[mask], r[mask], self.left[node], depth + 1)
        self.build(X[~mask], r[~mask], self.right[node], depth + 1)

    def finish(self) -> RegressionTree:
        return RegressionTree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=np.float64),
            max_depth=self.max_depth,
        )


def _partition_sse(r_left: np.ndarray, r_right: np.ndarray) -> float:
    """Summed squared error around the two child means, computed the same
    way for every candidate so identical partitions score identical bits."""
    return float(((r_left - r_left.mean()) ** 2).sum()
                 + ((r_right - r_right.mean()) ** 2).sum())


def _best_split(X: np.ndarray, r: np.ndarray, min_samples_leaf: int) -> tuple[int, float] | None:
    """Exact greedy search over every feature and every midpoint between
    consecutive distinct sorted values; minimises the summed squared error of
    the two child means. Ties go to the lowest feature index, then the lowest
    threshold (guaranteed by scanning in that order with a strict compare).

    Each feature's winner is found with prefix sums, then rescored with the
    canonical partition formula before comparing across features; different
    features that induce the same partition (common when one row is extreme
    in several features) would otherwise tie-break on summation rounding
    noise instead of feature order.
    """
    n = r.shape[0]
    best_score = np.inf
    best: tuple[int, float] | None = None
    for j in range(X.shape[1]):
        xs = X[:, j]
        order = np.argsort(xs, kind="stable")
        x_sorted = xs[order]
        r_sorted = r[order]
        s1 = np.cumsum(r_sorted)
        s2 = np.cumsum(r_sorted * r_sorted)
        total1, total2 = s1[-1], s2[-1]
        # Candidate boundaries sit between positions i-1 and i with distinct x.
        boundaries = np.flatnonzero(x_sorted[1:] > x_sorted[:-1]) + 1
        if boundaries.size == 0:
            continue
        sizes_left = boundaries
        sizes_right = n - boundaries
        valid = (sizes_left >= min_samples_leaf) & (sizes_right >= min_samples_leaf)
        if not valid.any():
            continue
        boundaries = boundaries[valid]
        sizes_left = sizes_left[valid]
        sizes_right = sizes_right[valid]
        left1 = s1[boundaries - 1]
        left2 = s2[boundaries - 1]
        sse = (left2 - left1 * left1 / sizes_left) + (
            (total2 - left2) - (total1 - left1) ** 2 / sizes_right
        )
        k = int(np.argmin(sse))
        i = boundaries[k]
        threshold = float((x_sorted[i - 1] + x_sorted[i]) / 2.0)
        mask = xs <= threshold
        score = _partition_sse(r[mask], r[~mask])
        if score < best_score:
            best_score = score
            best = (j, threshold)
    return best


def fit_tree(X: np.ndarray, residuals: np.ndarray, max_depth: int = 3,
             min_samples_leaf: int = 2) -> RegressionTree:
    """Greedy CART regression tree on the residual targets."""
    X = check_matrix(X)
    residuals = np.asarray(residuals, dtype=np.float64)
    if residuals.ndim != 1 or residuals.shape[0] != X.shape[0]:
        raise ValueError(
            f"residuals must be 1-D with {X.shape[0]} entries, got shape {residuals.shape}"
        )
    if X.shape[0] < 1:
        raise ValueError("need at least one row")
    builder = _TreeBuilder(max_depth, min_samples_leaf)
    root = builder._new_node()
    builder.build(X, residuals, root, 0)
    return builder.finish()


class GbmClassifier(ClassifierMixin, BaseEstimator):
    """Boosted regression trees on binary labels.

    Starts from the training-label mean, then repeatedly fits a depth-limited
    tree to the current residuals and adds ``learning_rate`` times its
    prediction. ``predict_proba`` returns the clamped raw score for the
    positive class as a 1-D vector.
    """

    kind = "gbm"

    def __init__(self, n_stages: int = 100, learning_rate: float = 0.1,
                 max_depth: int = 3, min_samples_leaf: int = 2):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y):
        if self.n_stages < 1:
            raise ValueError(f"n_stages must be >= 1, got {self.n_stages}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        X = check_matrix(X)
        y = check_binary_labels(y, X.shape[0]).astype(np.float64)
        if X.shape[0] < 2:
            raise ValueError(f"need at least 2 rows to fit, got {X.shape[0]}")

        self.initial_prediction_ = float(y.mean())
        predictions = np.full(y.shape, self.initial_prediction_)
        self.trees_ = []
        mse = [float(np.mean((y - predictions) ** 2))]
        for _ in range(self.n_stages):
            residuals = y - predictions
            tree = fit_tree(X, residuals, self.max_depth, self.min_samples_leaf)
            self.trees_.append(tree)
            predictions += self.learning_rate * tree.predict(X)
            mse.append(float(np.mean((y - predictions) ** 2)))
        self.stage_mse_curve_ = np.array(mse)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def decision_scores(self, X) -> np.ndarray:
        """Unclamped additive score F0 + lr * sum of tree predictions."""
        X = check_n_features(check_matrix(X), self.n_features_in_)
        score = np.full(X.shape[0], self.initial_prediction_)
        for tree in self.trees_:
            score += self.learning_rate * tree.predict(X)
        return score

    def predict_proba(self, X) -> np.ndarray:
        return np.clip(self.decision_scores(X), 0.0, 1.0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
