# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Class-bound predicates: for every class, a per-feature closed interval
assembled from the predicates on decision paths that end in that class's
leaves. The box is the loosest one the predicates describe: the lowest
``>`` threshold becomes the lower bound and the highest ``<=`` threshold
the upper bound.
"""

import json
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from dpgda.dpg.graph import DPGraph
from dpgda.errors import ConstraintError, DatasetError
from dpgda.predicate import GT, Predicate
from dpgda.surrogate.forest import Forest
from dpgda.surrogate.tree import DecisionTree
from dpgda.tabular import Dataset

logger = logging.getLogger(__name__)

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class Interval:
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        lower, upper = float(self.lower), float(self.upper)
        if math.isnan(lower) or math.isnan(upper):
            raise ConstraintError("interval bounds cannot be NaN")
        if lower > upper:
            raise ConstraintError(f"interval lower bound {lower} exceeds upper bound {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lower) or math.isfinite(self.upper)

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


class BoundsCheck(NamedTuple):
    satisfied: bool
    violations: List[Tuple[int, str]]


@dataclass(frozen=True, eq=False)
class ClassBounds:
    """
    Feasible box per class. Features without an entry are unbounded.
    `metadata` records how the bounds were produced.
    """
    intervals: Mapping[int, Mapping[int, Interval]]
    n_features: int
    metadata: Mapping[str, object] = field(default_factory=dict)

    @property
    def classes(self) -> List[int]:
        return sorted(self.intervals)

    def _require(self, cls: int) -> Mapping[int, Interval]:
        if cls not in self.intervals:
            raise ConstraintError(f"no bounds for class {cls}")
        return self.intervals[cls]

    def interval(self, cls: int, feature: int) -> Interval:
        return self._require(cls).get(feature, Interval())

    def arrays(self, cls: int) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper bound vectors with +-inf on open sides."""
        box = self._require(cls)
        lower = np.full(self.n_features, -np.inf)
        upper = np.full(self.n_features, np.inf)
        for feature, interval in box.items():
            lower[feature] = interval.lower
            upper[feature] = interval.upper
        return lower, upper

    def finite_sides(self, cls: int) -> int:
        lower, upper = self.arrays(cls)
        return int(np.isfinite(lower).sum() + np.isfinite(upper).sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassBounds):
            return NotImplemented
        normalise = lambda b: {c: {f: i for f, i in box.items() if i.is_bounded} for c, box in b.intervals.items()}
        return self.n_features == other.n_features and normalise(self) == normalise(other)

    __hash__ = None


def check_bounds(bounds: ClassBounds, cls: int, x: Sequence[float]) -> BoundsCheck:
    """
    Closed-interval membership of `x` in the box of `cls`.

    Returns:
        BoundsCheck: ``(satisfied, [(feature, "lower" | "upper"), ...])``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (bounds.n_features,):
        raise DatasetError(f"expected {bounds.n_features} features, got {x.size}")
    lower, upper = bounds.arrays(cls)
    violations = []
    for feature in range(bounds.n_features):
        if x[feature] < lower[feature]:
            violations.append((feature, LOWER))
        elif x[feature] > upper[feature]:
            violations.append((feature, UPPER))
    return BoundsCheck(not violations, violations)


def adherence(bounds: ClassBounds, cls: int, X: np.ndarray) -> np.ndarray:
    """
    Fraction of the finite bound sides of `cls` that each row of `X`
    satisfies (both sides of an interval count separately); 1 when the
    class has no finite side.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    lower, upper = bounds.arrays(cls)
    has_lower, has_upper = np.isfinite(lower), np.isfinite(upper)
    n_sides = int(has_lower.sum() + has_upper.sum())
    if n_sides == 0:
        return np.ones(X.shape[0])
    ok = ((X >= lower) & has_lower).sum(axis=1) + ((X <= upper) & has_upper).sum(axis=1)
    return ok / n_sides


def _class_path_support(tree: DecisionTree, X: np.ndarray, n_classes: int, decimals: int):
    """
    Per-class traversal counts of every (quantised) link predicate of one
    tree, counting only paths whose leaf predicts that class.
    """
    leaves = tree.apply(X)
    hits = np.zeros((tree.n_nodes, n_classes), dtype=np.int64)
    leaf_hits = np.bincount(leaves, minlength=tree.n_nodes)
    leaf_ids = np.flatnonzero(leaf_hits)
    hits[leaf_ids, tree.predicted[leaf_ids]] = leaf_hits[leaf_ids]
    parents = tree.parents()
    # pre-order numbering: children always follow their parent
    for v in range(tree.n_nodes - 1, 0, -1):
        hits[parents[v]] += hits[v]
    support: Dict[int, Counter] = defaultdict(Counter)
    for v in range(1, tree.n_nodes):
        for cls in np.flatnonzero(hits[v]):
            support[int(cls)][tree.link_predicate(v, int(parents[v])).quantized(decimals)] += int(hits[v, cls])
    return hits[0], support


def _box_from_predicates(predicates: Iterable[Predicate]) -> Dict[int, Tuple[float, float]]:
    lowers: Dict[int, float] = {}
    uppers: Dict[int, float] = {}
    for predicate in predicates:
        if predicate.op == GT:
            lowers[predicate.feature] = min(lowers.get(predicate.feature, math.inf), predicate.threshold)
        else:
            uppers[predicate.feature] = max(uppers.get(predicate.feature, -math.inf), predicate.threshold)
    box = {}
    for feature in sorted(set(lowers) | set(uppers)):
        box[feature] = (lowers.get(feature, -math.inf), uppers.get(feature, math.inf))
    return box


def _to_intervals(box: Dict[int, Tuple[float, float]], rows: np.ndarray) -> Dict[int, Interval]:
    out = {}
    for feature, (lower, upper) in box.items():
        if rows.shape[0]:
            if math.isfinite(lower):
                lower = min(lower, float(rows[:, feature].min()))
            if math.isfinite(upper):
                upper = max(upper, float(rows[:, feature].max()))
        if lower > upper:
            # sides from different paths that no single box satisfies: leave the feature open
            logger.debug("feature %d: lower %g exceeds upper %g, left open", feature, lower, upper)
            continue
        out[feature] = Interval(lower, upper)
    return out


def extract_class_bounds(dpg: DPGraph, forest: Forest, train: Dataset, min_support: float = 0.0,
                         classes: Optional[Iterable[int]] = None, enclose: bool = True) -> ClassBounds:
    """
    Derives the feasible box of each class.

    Args:
        dpg (DPGraph): Graph built from the same forest/train pair.
        forest (Forest): Surrogate that produced the graph.
        train (Dataset): Samples whose paths are followed.
        min_support (float): Keep a predicate for class c only when it lies on
            at least this fraction of the class-c paths.
        classes: Class ids to extract; every class present in `train` by default.
        enclose (bool): Widen finite sides to the extreme values of the
            class's own training samples so the box contains all of them.
    """
    if not 0.0 <= min_support <= 1.0:
        raise ConstraintError(f"min_support must lie in [0, 1], got {min_support}")
    if classes is None:
        classes = train.present_classes().tolist()
    classes = [int(c) for c in classes]

    n_classes = max(forest.n_classes, train.n_classes)
    totals = np.zeros(n_classes, dtype=np.int64)
    support: Dict[int, Counter] = defaultdict(Counter)
    for tree in forest.trees:
        tree_totals, tree_support = _class_path_support(tree, train.features, n_classes, dpg.quantize_decimals)
        totals += tree_totals
        for cls, counter in tree_support.items():
            support[cls].update(counter)

    intervals: Dict[int, Dict[int, Interval]] = {}
    for cls in classes:
        name = train.class_names[cls] if cls < train.n_classes else str(cls)
        if totals[cls] == 0:
            raise ConstraintError(f"class '{name}' has no training paths ending in its leaves")
        kept = [p for p, count in support[cls].items() if count >= 1 and count / totals[cls] >= min_support]
        unknown = [p for p in kept if p not in dpg.predicate_nodes]
        if unknown:
            raise ConstraintError(f"predicate {unknown[0]} missing from the DPG; was it built from another forest?")
        box = _box_from_predicates(kept)
        rows = train.rows_of(cls) if enclose else np.empty((0, train.n_features))
        intervals[cls] = _to_intervals(box, rows)
        logger.debug("class %s: %d predicates kept, %d features bounded", name, len(kept), len(intervals[cls]))

    metadata = {"quantize_decimals": dpg.quantize_decimals, "min_support": min_support,
                "forest_seed": forest.config.seed}
    return ClassBounds(intervals, train.n_features, metadata)


def _json_number(value: float):
    return None if math.isinf(value) else value


def export_constraints(bounds: ClassBounds, feature_names: Sequence[str], class_names: Sequence[str]) -> dict:
    """
    JSON document of the bounds keyed by class and feature name; null stands
    for an open side.
    """
    if len(feature_names) != bounds.n_features:
        raise ConstraintError(f"{len(feature_names)} feature names for {bounds.n_features} features")
    document = {"class_bounds": {}, "metadata": dict(bounds.metadata)}
    for cls in bounds.classes:
        if cls >= len(class_names):
            raise ConstraintError(f"no class name for class id {cls}")
        entry = {}
        for feature, interval in sorted(bounds.intervals[cls].items()):
            if interval.is_bounded:
                entry[feature_names[feature]] = {"lower": _json_number(interval.lower),
                                                 "upper": _json_number(interval.upper)}
        document["class_bounds"][class_names[cls]] = entry
    return document


def import_constraints(document: dict, feature_names: Sequence[str], class_names: Sequence[str]) -> ClassBounds:
    if "class_bounds" not in document:
        raise ConstraintError("constraints document lacks 'class_bounds'")
    intervals: Dict[int, Dict[int, Interval]] = {}
    for class_name, entry in document["class_bounds"].items():
        if class_name not in class_names:
            raise ConstraintError(f"unknown class '{class_name}' in constraints document")
        box = {}
        for feature_name, side in entry.items():
            if feature_name not in feature_names:
                raise ConstraintError(f"unknown feature '{feature_name}' in constraints of class '{class_name}'")
            lower = -math.inf if side.get("lower") is None else float(side["lower"])
            upper = math.inf if side.get("upper") is None else float(side["upper"])
            box[list(feature_names).index(feature_name)] = Interval(lower, upper)
        intervals[list(class_names).index(class_name)] = box
    return ClassBounds(intervals, len(feature_names), dict(document.get("metadata", {})))


def save_constraints(document: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    return path


def bounds_from_mapping(mapping: Mapping[int, Mapping[int, Tuple[float, float]]], n_features: int) -> ClassBounds:
    """Hand-written bounds, e.g. ``{1: {0: (30, inf), 2: (600, inf)}}``."""
    return ClassBounds({int(c): {int(f): Interval(lo, hi) for f, (lo, hi) in box.items()}
                        for c, box in mapping.items()}, n_features)
