# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np

from dpgda.samplers.base_sampler import BaseSampler, minority_rows
from dpgda.seeding import make_rng
from dpgda.tabular import Dataset


def ros(train: Dataset, minority_class: int, m: int, seed: int = 0) -> np.ndarray:
    """Random over-sampling: `m` minority rows drawn uniformly with replacement."""
    rows = minority_rows(train, minority_class)
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    picks = make_rng(seed, "ros").integers(0, rows.shape[0], size=m)
    return rows[picks].copy()


class RandomOverSampler(BaseSampler):
    name = "ros"

    def sample(self, train, minority_class, m, seed):
        return ros(train, minority_class, m, seed)
