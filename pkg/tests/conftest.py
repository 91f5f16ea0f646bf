# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np
import pytest

from dpgda.config import DPGConfig, ForestConfig, GAConfig, PipelineConfig
from dpgda.constraints import DomainRule
from dpgda.tabular import Dataset, write_csv


def make_imbalanced(n_majority: int = 60, n_minority: int = 20, seed: int = 0) -> Dataset:
    """Two features; the minority sits at x0 >= 7, the majority at x0 <= 6."""
    rng = np.random.default_rng(seed)
    majority = np.column_stack([rng.uniform(0.0, 6.0, n_majority), rng.uniform(0.0, 10.0, n_majority)])
    minority = np.column_stack([rng.uniform(7.0, 10.0, n_minority), rng.uniform(0.0, 10.0, n_minority)])
    X = np.round(np.vstack([majority, minority]), 3)
    y = np.concatenate([np.zeros(n_majority, dtype=np.int64), np.ones(n_minority, dtype=np.int64)])
    return Dataset(X, y, ("x0", "x1"), ("major", "minor"))


@pytest.fixture
def imbalanced() -> Dataset:
    return make_imbalanced()


@pytest.fixture
def box_rules():
    return [DomainRule(feature="x0", lower=0.0, upper=10.0), DomainRule(feature="x1", lower=0.0, upper=10.0)]


@pytest.fixture
def tiny_forest_cfg() -> ForestConfig:
    return ForestConfig(n_trees=5, max_depth=3, min_samples_leaf=1)


@pytest.fixture
def tiny_pipeline(tiny_forest_cfg) -> PipelineConfig:
    return PipelineConfig(forest=tiny_forest_cfg, dpg=DPGConfig(),
                          ga=GAConfig(population_size=12, max_generations=15, plateau_patience=4))


@pytest.fixture
def imbalanced_csv(tmp_path, imbalanced):
    return write_csv(imbalanced, tmp_path / "train.csv")
