# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import math

import numpy as np
import pytest

from dpgda.config import ForestConfig
from dpgda.constraints import bounds_to_rules
from dpgda.dpg import (ClassLeaf, Interval, adherence, bounds_from_mapping, build_dpg, check_bounds,
                       export_constraints, extract_class_bounds, import_constraints, to_dot)
from dpgda.errors import ConstraintError
from dpgda.predicate import GT, LE, Predicate
from dpgda.surrogate import DecisionTree, train_forest
from dpgda.surrogate.forest import Forest
from dpgda.tabular import Dataset, feature_stats

LOAN = ("Age", "Income", "CreditScore", "NumChildren")


def _stump_forest(X: np.ndarray) -> Forest:
    tree = DecisionTree(feature=[0, -1, -1], threshold=[0.5, 0.0, 0.0], left=[1, -1, -1], right=[2, -1, -1],
                        class_counts=[[2, 1], [2, 0], [0, 1]], n_features=1)
    return Forest((tree,), ForestConfig(n_trees=1), 2, 1, feature_stats(X))


def _loan_bounds():
    return bounds_from_mapping({0: {0: (30, math.inf), 1: (45, math.inf), 2: (600, math.inf),
                                    3: (-math.inf, 3)}}, 4)


def test_stump_edge_weights():
    X = np.array([[0.1], [0.2], [0.9]])
    ds = Dataset(X, [0, 0, 1], ("f0",), ("a", "b"))
    dpg = build_dpg(_stump_forest(X), ds)
    assert dict(dpg.edges) == {(Predicate(0, LE, 0.5), ClassLeaf(0)): 2, (Predicate(0, GT, 0.5), ClassLeaf(1)): 1}
    assert dpg.n_paths == 3


def test_thresholds_are_quantized(imbalanced, tiny_forest_cfg):
    dpg = build_dpg(train_forest(imbalanced, tiny_forest_cfg), imbalanced, quantize_decimals=1)
    assert all(p.threshold == round(p.threshold, 1) for p in dpg.predicate_nodes)


def test_dpg_parallel_equals_serial(imbalanced, tiny_forest_cfg):
    forest = train_forest(imbalanced, tiny_forest_cfg)
    assert dict(build_dpg(forest, imbalanced).edges) == dict(build_dpg(forest, imbalanced, jobs=3).edges)


def test_edge_mass_into_leaves_counts_every_path(imbalanced, tiny_forest_cfg):
    forest = train_forest(imbalanced, tiny_forest_cfg)
    dpg = build_dpg(forest, imbalanced)
    # single-leaf trees contribute no edges
    rooted = sum(1 for tree in forest.trees if tree.n_nodes > 1)
    into_leaves = sum(w for (_, target), w in dpg.edges.items() if isinstance(target, ClassLeaf))
    assert into_leaves == rooted * imbalanced.n_samples


def test_to_dot_lists_every_node(imbalanced, tiny_forest_cfg):
    dpg = build_dpg(train_forest(imbalanced, tiny_forest_cfg), imbalanced)
    text = to_dot(dpg, imbalanced.feature_names, imbalanced.class_names)
    assert text.startswith("digraph DPG {")
    assert text.count("shape=") == len(dpg.nodes)
    assert "class minor" in text


def test_loan_candidate_breaks_credit_bound():
    check = check_bounds(_loan_bounds(), 0, [52, 60, 590, 3])
    assert check.satisfied is False
    assert check.violations == [(2, "lower")]
    assert adherence(_loan_bounds(), 0, np.array([52, 60, 590, 3]))[0] == pytest.approx(0.75)


def test_unbounded_class_has_full_adherence():
    bounds = bounds_from_mapping({0: {}}, 3)
    assert adherence(bounds, 0, np.zeros((2, 3))).tolist() == [1.0, 1.0]
    assert check_bounds(bounds, 0, [1e9, -1e9, 0]).satisfied


def test_interval_rejects_inverted_sides():
    with pytest.raises(ConstraintError):
        Interval(2.0, 1.0)


def test_training_samples_lie_inside_their_class_box(imbalanced, tiny_forest_cfg):
    forest = train_forest(imbalanced, tiny_forest_cfg)
    bounds = extract_class_bounds(build_dpg(forest, imbalanced), forest, imbalanced)
    for cls in bounds.classes:
        for row in imbalanced.rows_of(cls):
            assert check_bounds(bounds, cls, row).satisfied


def test_constraints_document_round_trip(imbalanced, tiny_forest_cfg):
    forest = train_forest(imbalanced, tiny_forest_cfg)
    bounds = extract_class_bounds(build_dpg(forest, imbalanced), forest, imbalanced)
    document = export_constraints(bounds, imbalanced.feature_names, imbalanced.class_names)
    assert set(document["class_bounds"]) == {"major", "minor"}
    assert import_constraints(document, imbalanced.feature_names, imbalanced.class_names) == bounds


def test_import_rejects_unknown_feature():
    document = {"class_bounds": {"a": {"nope": {"lower": 1.0, "upper": None}}}}
    with pytest.raises(ConstraintError):
        import_constraints(document, ("x",), ("a",))


def test_bounds_to_rules_skips_open_features():
    bounds = bounds_from_mapping({1: {0: (1.0, math.inf), 2: (-1.0, 4.0)}}, 3)
    rules = bounds_to_rules(bounds, 1, ("a", "b", "c"))
    assert [(r.feature, r.lower, r.upper) for r in rules] == [("a", 1.0, None), ("c", -1.0, 4.0)]


def _oracle_box(forest: Forest, ds: Dataset, cls: int, decimals: int):
    """Walks the raw split arrays of every tree and keeps the widest threshold per side."""
    lowers, uppers = {}, {}
    for tree in forest.trees:
        for x in ds.features:
            node, sides = 0, []
            while tree.feature[node] >= 0:
                f, t = int(tree.feature[node]), float(tree.threshold[node])
                went_left = x[f] <= t
                sides.append((f, went_left, round(t, decimals)))
                node = int(tree.left[node] if went_left else tree.right[node])
            if int(np.argmax(tree.class_counts[node])) != cls:
                continue
            for f, went_left, t in sides:
                if went_left:
                    uppers[f] = max(uppers.get(f, -math.inf), t)
                else:
                    lowers[f] = min(lowers.get(f, math.inf), t)
    box = {}
    for f in set(lowers) | set(uppers):
        lo, hi = lowers.get(f, -math.inf), uppers.get(f, math.inf)
        if lo <= hi:
            box[f] = (lo, hi)
    return box


@pytest.mark.parametrize("seed", range(50))
def test_bounds_match_path_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(10, 41)), int(rng.integers(1, 5))
    X = np.round(rng.uniform(-5, 5, size=(n, d)), 2)
    y = (X[:, 0] + rng.normal(0, 1, n) > 0).astype(np.int64)
    y[:2] = [0, 1]
    ds = Dataset(X, y, tuple(f"f{i}" for i in range(d)), ("a", "b"))
    cfg = ForestConfig(n_trees=int(rng.integers(1, 4)), max_depth=int(rng.integers(1, 3)), min_samples_leaf=1,
                       seed=seed)
    forest = train_forest(ds, cfg)
    dpg = build_dpg(forest, ds)

    reached = sorted({int(tree.predicted[leaf]) for tree in forest.trees for leaf in tree.apply(X)})
    bounds = extract_class_bounds(dpg, forest, ds, classes=reached, enclose=False)
    for cls in reached:
        expected = {f: Interval(lo, hi) for f, (lo, hi) in _oracle_box(forest, ds, cls, dpg.quantize_decimals).items()}
        actual = {f: i for f, i in bounds.intervals[cls].items() if i.is_bounded}
        assert actual == expected


def test_conflicting_sides_leave_feature_open():
    # class 1 is reached through x > 0.7 in one tree and x <= 0.3 in the other
    X = np.array([[0.0], [0.5], [1.0]])
    ds = Dataset(X, [1, 0, 1], ("x",), ("a", "b"))
    high = DecisionTree(feature=[0, -1, -1], threshold=[0.7, 0.0, 0.0], left=[1, -1, -1], right=[2, -1, -1],
                        class_counts=[[2, 1], [2, 0], [0, 1]], n_features=1)
    low = DecisionTree(feature=[0, -1, -1], threshold=[0.3, 0.0, 0.0], left=[1, -1, -1], right=[2, -1, -1],
                       class_counts=[[2, 1], [0, 1], [2, 0]], n_features=1)
    forest = Forest((high, low), ForestConfig(n_trees=2), 2, 1, feature_stats(X))
    dpg = build_dpg(forest, ds)

    bare = extract_class_bounds(dpg, forest, ds, enclose=False)
    assert bare.intervals[1] == {}
    assert bare.intervals[0] == {0: Interval(0.3, 0.7)}

    enclosed = extract_class_bounds(dpg, forest, ds)
    assert enclosed.intervals[1] == {0: Interval(0.0, 1.0)}
