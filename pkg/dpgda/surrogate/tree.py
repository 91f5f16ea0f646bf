# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Greedy CART classification trees stored as flat node arrays.

Nodes are numbered in pre-order, so a child always has a larger id than its
parent. Internal nodes route ``x[feature] <= threshold`` to the left child
and everything else to the right; leaves carry the class counts of the
training rows that reached them.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dpgda.errors import DatasetError, SurrogateError
from dpgda.predicate import GT, LE, Predicate

LEAF = -1
# Slack for the "split never increases impurity" check
_IMPURITY_SLACK = 1e-12


def gini(class_counts: Sequence[float]) -> float:
    """Gini impurity ``1 - sum(p_i^2)`` of a class count vector."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ValueError("class counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("gini impurity of an empty node is undefined")
    p = counts / total
    return float(1.0 - np.sum(p * p))


@dataclass(frozen=True)
class TreeNode:
    """Read-only view of a single node."""
    node_id: int
    feature: int
    threshold: float
    left: int
    right: int
    class_counts: Tuple[int, ...]
    predicted_class: int

    @property
    def is_leaf(self) -> bool:
        return self.feature == LEAF


class DecisionTree:
    def __init__(self, feature, threshold, left, right, class_counts, n_features: int):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.class_counts = np.asarray(class_counts, dtype=np.int64)
        # argmax breaks ties towards the lowest class id
        self.predicted = np.argmax(self.class_counts, axis=1).astype(np.int64)
        self.n_features = int(n_features)
        for array in (self.feature, self.threshold, self.left, self.right, self.class_counts, self.predicted):
            array.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_classes(self) -> int:
        return self.class_counts.shape[1]

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == LEAF

    def node(self, node: int) -> TreeNode:
        return TreeNode(node, int(self.feature[node]), float(self.threshold[node]), int(self.left[node]),
                        int(self.right[node]), tuple(int(c) for c in self.class_counts[node]),
                        int(self.predicted[node]))

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if not self.is_leaf(node):
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def parents(self) -> np.ndarray:
        parent = np.full(self.n_nodes, -1, dtype=np.int64)
        internal = np.flatnonzero(self.feature != LEAF)
        parent[self.left[internal]] = internal
        parent[self.right[internal]] = internal
        return parent

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise DatasetError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf id reached by every row of `X`."""
        X = self._check(X)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            active = np.flatnonzero(self.feature[node] != LEAF)
            if active.size == 0:
                return node
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])

    def node_visits(self, X: np.ndarray) -> np.ndarray:
        """Number of rows of `X` passing through every node."""
        X = self._check(X)
        visits = np.zeros(self.n_nodes, dtype=np.int64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        visits[0] = X.shape[0]
        while True:
            active = np.flatnonzero(self.feature[node] != LEAF)
            if active.size == 0:
                return visits
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            np.add.at(visits, node[active], 1)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predicted[self.apply(X)]

    def path_nodes(self, x: Sequence[float]) -> List[int]:
        x = self._check(x)[0]
        node, path = 0, [0]
        while not self.is_leaf(node):
            node = int(self.left[node] if x[self.feature[node]] <= self.threshold[node] else self.right[node])
            path.append(node)
        return path

    def decision_path(self, x: Sequence[float]) -> List[Predicate]:
        """
        Predicates met on the route of `x` from the root to its leaf, one per
        internal node: ``(f, <=, t)`` when the left branch was taken, else
        ``(f, >, t)``.
        """
        path = self.path_nodes(x)
        predicates = []
        for node, child in zip(path[:-1], path[1:]):
            op = LE if child == self.left[node] else GT
            predicates.append(Predicate(int(self.feature[node]), op, float(self.threshold[node])))
        return predicates

    def link_predicate(self, child: int, parent: Optional[int] = None) -> Predicate:
        """The predicate a row satisfies when moving from its parent into `child`."""
        if parent is None:
            parent = int(self.parents()[child])
        op = LE if child == self.left[parent] else GT
        return Predicate(int(self.feature[parent]), op, float(self.threshold[parent]))

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            # JSON has no NaN; leaves store 0.0 and are recognised by feature == -1
            "threshold": [0.0 if f == LEAF else float(t) for f, t in zip(self.feature, self.threshold)],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "class_counts": self.class_counts.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, n_features: int) -> "DecisionTree":
        return cls(data["feature"], data["threshold"], data["left"], data["right"], data["class_counts"], n_features)

    def structure_equals(self, other: "DecisionTree") -> bool:
        return (np.array_equal(self.feature, other.feature) and np.array_equal(self.threshold, other.threshold)
                and np.array_equal(self.left, other.left) and np.array_equal(self.right, other.right)
                and np.array_equal(self.class_counts, other.class_counts))


def _scan_feature(values: np.ndarray, y: np.ndarray, n_classes: int, min_samples_leaf: int):
    """Best midpoint split on one feature: (weighted gini, threshold) or None."""
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    xs = values[order]
    onehot = np.zeros((n, n_classes), dtype=np.float64)
    onehot[np.arange(n), y[order]] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]
    right = left[-1] + onehot[-1] - left
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    if not valid.any():
        return None
    gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
    weighted = (n_left * gini_left + n_right * gini_right) / n
    weighted[~valid] = np.inf
    i = int(np.argmin(weighted))
    threshold = (xs[i] + xs[i + 1]) / 2.0
    if threshold >= xs[i + 1]:
        # adjacent floats: the midpoint rounds onto the upper value
        threshold = xs[i]
    return float(weighted[i]), float(threshold)


class _TreeBuilder:
    def __init__(self, X, y, n_classes, max_depth, min_samples_leaf, features_per_split, rng):
        self.X, self.y = X, y
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.features_per_split = features_per_split
        self.rng = rng
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.counts: List[np.ndarray] = []

    def _new_node(self, counts) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.counts.append(counts)
        return len(self.feature) - 1

    def _best_split(self, idx: np.ndarray, parent_gini: float):
        X, y = self.X[idx], self.y[idx]
        d = X.shape[1]
        permutation = self.rng.permutation(d)
        sampled = np.sort(permutation[:self.features_per_split])
        best = None
        for f in sampled:
            found = _scan_feature(X[:, f], y, self.n_classes, self.min_samples_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], int(f), found[1])
        if best is None:
            # none of the sampled features can split: keep searching the rest
            for f in permutation[self.features_per_split:]:
                found = _scan_feature(X[:, f], y, self.n_classes, self.min_samples_leaf)
                if found is not None:
                    best = (found[0], int(f), found[1])
                    break
        if best is None or best[0] > parent_gini + _IMPURITY_SLACK:
            return None
        return best[1], best[2]

    def grow(self, idx: np.ndarray, depth: int) -> int:
        counts = np.bincount(self.y[idx], minlength=self.n_classes)
        node = self._new_node(counts)
        pure = np.count_nonzero(counts) <= 1
        if depth >= self.max_depth or pure or idx.size < 2 * self.min_samples_leaf:
            return node
        split = self._best_split(idx, gini(counts))
        if split is None:
            return node
        feature, threshold = split
        mask = self.X[idx, feature] <= threshold
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = self.grow(idx[mask], depth + 1)
        self.right[node] = self.grow(idx[~mask], depth + 1)
        return node

    def build(self) -> DecisionTree:
        self.grow(np.arange(self.X.shape[0]), 0)
        return DecisionTree(self.feature, self.threshold, self.left, self.right,
                            np.vstack(self.counts), self.X.shape[1])


def build_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_depth: int, min_samples_leaf: int,
               features_per_split: int, rng: np.random.Generator) -> DecisionTree:
    """
    Grows one tree greedily by Gini reduction.

    Args:
        X (np.ndarray): Training rows, shape (n, d).
        y (np.ndarray): Class ids in [0, n_classes).
        max_depth (int): Depth limit; the root has depth 0.
        min_samples_leaf (int): Minimum rows on each side of a split.
        features_per_split (int): Candidate features drawn per node.
        rng (np.random.Generator): Source of the per-node feature draws.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise SurrogateError("cannot grow a tree on zero rows")
    builder = _TreeBuilder(X, y, n_classes, max_depth, min_samples_leaf,
                           max(1, min(features_per_split, X.shape[1])), rng)
    return builder.build()
