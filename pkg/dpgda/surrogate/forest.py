# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from dpgda.config import ForestConfig
from dpgda.errors import DatasetError, SurrogateError
from dpgda.metrics import macro_metrics
from dpgda.predicate import Predicate
from dpgda.seeding import make_rng
from dpgda.surrogate.tree import DecisionTree, build_tree
from dpgda.tabular import Dataset, FeatureStats, feature_stats

logger = logging.getLogger(__name__)

FOREST_FORMAT = "dpgda-forest"
FOREST_VERSION = 1


@dataclass(frozen=True, eq=False)
class Forest:
    """A trained, immutable random forest surrogate."""
    trees: tuple
    config: ForestConfig
    n_classes: int
    n_features: int
    stats: FeatureStats

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise DatasetError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X

    def votes(self, X) -> np.ndarray:
        """Vote counts, shape (n, n_classes)."""
        X = self._check(X)
        counts = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            np.add.at(counts, (rows, tree.predict(X)), 1)
        return counts

    def predict_many(self, X) -> np.ndarray:
        # argmax: ties go to the lowest class id
        return np.argmax(self.votes(X), axis=1).astype(np.int64)

    def predict(self, x: Sequence[float]) -> int:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise DatasetError("predict expects a single feature vector")
        return int(self.predict_many(x)[0])

    def structure_equals(self, other: "Forest") -> bool:
        return self.n_trees == other.n_trees and all(a.structure_equals(b) for a, b in zip(self.trees, other.trees))


def _grow_one(train: Dataset, cfg: ForestConfig, index: int) -> DecisionTree:
    # seeds depend only on (forest seed, tree index): serial == parallel
    rng = make_rng(cfg.seed, "tree", index)
    n = train.n_samples
    size = max(1, int(round(cfg.bootstrap_fraction * n)))
    sample = rng.integers(0, n, size=size)
    return build_tree(train.features[sample], train.labels[sample], train.n_classes, cfg.max_depth,
                      cfg.min_samples_leaf, cfg.resolve_features_per_split(train.n_features), rng)


def train_tree(train: Dataset, max_depth: int = 8, min_samples_leaf: int = 1, seed: int = 0) -> DecisionTree:
    """Single CART tree on all rows with every feature considered at each node."""
    if train.n_samples == 0:
        raise SurrogateError("cannot train a tree on an empty dataset")
    rng = make_rng(seed, "single-tree")
    return build_tree(train.features, train.labels, train.n_classes, max_depth, min_samples_leaf,
                      train.n_features, rng)


def train_forest(train: Dataset, cfg: ForestConfig = ForestConfig()) -> Forest:
    """
    Trains `cfg.n_trees` CART trees on bootstrap samples of `train`.

    Args:
        train (Dataset): Training data.
        cfg (ForestConfig): Forest hyperparameters and seed.

    Returns:
        Forest: Deterministic for a fixed seed, whatever `cfg.jobs` is.
    """
    if train.n_samples < 2 * cfg.min_samples_leaf:
        raise SurrogateError(
            f"need at least {2 * cfg.min_samples_leaf} samples for min_samples_leaf={cfg.min_samples_leaf}, "
            f"got {train.n_samples}")
    if train.present_classes().size < 2:
        logger.warning("training data holds a single class; every tree will be a single leaf")

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            trees = list(pool.map(lambda i: _grow_one(train, cfg, i), range(cfg.n_trees)))
    else:
        trees = [_grow_one(train, cfg, i) for i in range(cfg.n_trees)]

    forest = Forest(tuple(trees), cfg, train.n_classes, train.n_features, feature_stats(train))
    logger.debug("trained forest: trees=%d max_depth=%d mean_nodes=%.1f", forest.n_trees, cfg.max_depth,
                 float(np.mean([tree.n_nodes for tree in trees])))
    return forest


def predict(forest: Forest, x: Sequence[float]) -> int:
    return forest.predict(x)


def predict_many(forest: Forest, X) -> np.ndarray:
    return forest.predict_many(X)


def decision_path(tree: DecisionTree, x: Sequence[float]) -> List[Predicate]:
    return tree.decision_path(x)


def surrogate_f1(forest: Forest, test: Dataset) -> float:
    """Macro F1 of the surrogate on held-out data (fidelity check)."""
    n_classes = max(forest.n_classes, test.n_classes)
    return macro_metrics(test.labels, forest.predict_many(test.features), n_classes)[0]


def forest_to_json(forest: Forest) -> dict:
    return {
        "format": FOREST_FORMAT,
        "version": FOREST_VERSION,
        "config": forest.config.model_dump(),
        "n_classes": forest.n_classes,
        "n_features": forest.n_features,
        "stats": forest.stats.to_dict(),
        "trees": [tree.to_dict() for tree in forest.trees],
    }


def forest_from_json(document: dict) -> Forest:
    if document.get("format") != FOREST_FORMAT:
        raise SurrogateError("not a dpgda forest document")
    if document.get("version") != FOREST_VERSION:
        raise SurrogateError(f"unsupported forest document version {document.get('version')}")
    n_features = int(document["n_features"])
    trees = tuple(DecisionTree.from_dict(tree, n_features) for tree in document["trees"])
    return Forest(trees, ForestConfig.model_validate(document["config"]), int(document["n_classes"]),
                  n_features, FeatureStats.from_dict(document["stats"]))


def save_forest(forest: Forest, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(forest_to_json(forest)), encoding="utf-8")
    return path


def load_forest(path) -> Forest:
    return forest_from_json(json.loads(Path(path).read_text(encoding="utf-8")))
