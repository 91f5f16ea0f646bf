# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .graph import ClassLeaf, DPGraph, build_dpg, edges_into, node_sort_key, to_dot, tree_edge_counts
from .bounds import (BoundsCheck, ClassBounds, Interval, adherence, bounds_from_mapping, check_bounds,
                     export_constraints, extract_class_bounds, import_constraints, save_constraints)

__all__ = [
    'ClassLeaf',
    'DPGraph',
    'build_dpg',
    'tree_edge_counts',
    'to_dot',
    'edges_into',
    'node_sort_key',
    'Interval',
    'ClassBounds',
    'BoundsCheck',
    'extract_class_bounds',
    'export_constraints',
    'import_constraints',
    'save_constraints',
    'check_bounds',
    'adherence',
    'bounds_from_mapping',
]
