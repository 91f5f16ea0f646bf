# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .classifiers import (CLASSIFIERS, BaseClassifier, KNNClassifier, LogisticRegressionClassifier, TreeClassifier,
                          predict_all, train_classifier)
from .runner import (RESULT_COLUMNS, BenchDataset, BenchResult, ablation_grid, aggregate_scores,
                     load_benchmark_datasets, plan_cells, read_results, run_benchmark, runtime_summary,
                     scores_for_ranking, write_results)
from .stats import NEMENYI_Q_005, RankSummary, critical_difference, friedman_nemenyi, nemenyi_q

__all__ = [
    'CLASSIFIERS',
    'BaseClassifier',
    'TreeClassifier',
    'KNNClassifier',
    'LogisticRegressionClassifier',
    'train_classifier',
    'predict_all',
    'RESULT_COLUMNS',
    'BenchDataset',
    'BenchResult',
    'plan_cells',
    'load_benchmark_datasets',
    'run_benchmark',
    'write_results',
    'read_results',
    'aggregate_scores',
    'runtime_summary',
    'scores_for_ranking',
    'ablation_grid',
    'RankSummary',
    'friedman_nemenyi',
    'critical_difference',
    'nemenyi_q',
    'NEMENYI_Q_005',
]
