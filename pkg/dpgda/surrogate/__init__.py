# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .tree import DecisionTree, TreeNode, build_tree, gini
from .forest import (Forest, decision_path, forest_from_json, forest_to_json, load_forest, predict, predict_many,
                     save_forest, surrogate_f1, train_forest, train_tree)

__all__ = [
    'DecisionTree',
    'TreeNode',
    'Forest',
    'build_tree',
    'gini',
    'train_forest',
    'train_tree',
    'predict',
    'predict_many',
    'decision_path',
    'surrogate_f1',
    'forest_to_json',
    'forest_from_json',
    'save_forest',
    'load_forest',
]
