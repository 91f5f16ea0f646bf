# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Decision Predicate Graph: the split predicates of a forest and its class
leaves, linked by how often training samples traverse one right after the
other on their decision paths.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from dpgda.predicate import Predicate
from dpgda.surrogate.forest import Forest
from dpgda.surrogate.tree import DecisionTree
from dpgda.tabular import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ClassLeaf:
    """Terminal node standing for every tree leaf that predicts `cls`."""
    cls: int

    def __str__(self) -> str:
        return f"class {self.cls}"


Node = Union[Predicate, ClassLeaf]
Edge = Tuple[Node, Node]


def node_sort_key(node: Node) -> tuple:
    if isinstance(node, ClassLeaf):
        return (1, node.cls, "", 0.0)
    return (0, node.feature, node.op, node.threshold)


@dataclass(frozen=True, eq=False)
class DPGraph:
    predicate_nodes: FrozenSet[Predicate]
    leaf_nodes: FrozenSet[ClassLeaf]
    edges: Mapping[Edge, int]
    quantize_decimals: int
    n_paths: int

    @property
    def nodes(self) -> list:
        return sorted(list(self.predicate_nodes) + list(self.leaf_nodes), key=node_sort_key)

    def in_weight(self, node: Node) -> int:
        return sum(weight for (_, target), weight in self.edges.items() if target == node)

    def out_edges(self, node: Node) -> Dict[Node, int]:
        return {target: weight for (source, target), weight in self.edges.items() if source == node}


def tree_edge_counts(tree: DecisionTree, X: np.ndarray, decimals: int) -> Tuple[Counter, set, set]:
    """
    Edge counts contributed by one tree. A node reached by n rows adds n to
    the edge from its parent's link predicate to its own link predicate,
    and a leaf adds n to the edge from its link predicate to its class.
    """
    visits = tree.node_visits(X)
    parents = tree.parents()
    links = {v: tree.link_predicate(v, int(parents[v])).quantized(decimals) for v in range(1, tree.n_nodes)}
    edges: Counter = Counter()
    predicates, leaves = set(), set()
    for v in range(tree.n_nodes):
        count = int(visits[v])
        if count == 0:
            continue
        if v != 0:
            predicates.add(links[v])
            if parents[v] != 0:
                edges[(links[int(parents[v])], links[v])] += count
        if tree.is_leaf(v):
            leaf = ClassLeaf(int(tree.predicted[v]))
            leaves.add(leaf)
            if v != 0:
                edges[(links[v], leaf)] += count
    return edges, predicates, leaves


def build_dpg(forest: Forest, train: Dataset, quantize_decimals: int = 2, jobs: int = 1) -> DPGraph:
    """
    Builds the DPG from every (tree, training sample) decision path.

    Args:
        forest (Forest): Trained surrogate.
        train (Dataset): Samples whose paths are counted.
        quantize_decimals (int): Thresholds are rounded to this many decimals
            once, when the node key is created; equal keys share one node.
        jobs (int): Trees processed in parallel; partial counts are merged in
            tree order so the result does not depend on it.
    """
    X = train.features
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(lambda tree: tree_edge_counts(tree, X, quantize_decimals), forest.trees))
    else:
        partials = [tree_edge_counts(tree, X, quantize_decimals) for tree in forest.trees]

    edges: Counter = Counter()
    predicates, leaves = set(), set()
    for partial_edges, partial_predicates, partial_leaves in partials:
        edges.update(partial_edges)
        predicates |= partial_predicates
        leaves |= partial_leaves

    ordered = dict(sorted(edges.items(), key=lambda item: (node_sort_key(item[0][0]), node_sort_key(item[0][1]))))
    graph = DPGraph(frozenset(predicates), frozenset(leaves), MappingProxyType(ordered), quantize_decimals,
                    forest.n_trees * train.n_samples)
    logger.debug("built DPG: predicates=%d leaves=%d edges=%d", len(predicates), len(leaves), len(ordered))
    return graph


def _label(node: Node, feature_names: Optional[Sequence[str]], class_names: Optional[Sequence[str]]) -> str:
    if isinstance(node, ClassLeaf):
        return f"class {class_names[node.cls]}" if class_names is not None else str(node)
    return node.describe(feature_names)


def to_dot(dpg: DPGraph, feature_names: Optional[Sequence[str]] = None,
           class_names: Optional[Sequence[str]] = None) -> str:
    """Graphviz text of the graph; edge labels are traversal counts."""
    ids = {node: f"n{i}" for i, node in enumerate(dpg.nodes)}
    lines = ["digraph DPG {", "  rankdir=LR;"]
    for node, node_id in ids.items():
        shape = "box" if isinstance(node, ClassLeaf) else "ellipse"
        label = _label(node, feature_names, class_names).replace('"', '\\"')
        lines.append(f'  {node_id} [label="{label}", shape={shape}];')
    for (source, target), weight in dpg.edges.items():
        lines.append(f'  {ids[source]} -> {ids[target]} [label="{weight}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def edges_into(dpg: DPGraph, nodes: Iterable[Node]) -> Dict[Node, int]:
    wanted = set(nodes)
    totals: Dict[Node, int] = {node: 0 for node in wanted}
    for (_, target), weight in dpg.edges.items():
        if target in wanted:
            totals[target] += weight
    return totals
