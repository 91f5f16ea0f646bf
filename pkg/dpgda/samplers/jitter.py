# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np

from dpgda.samplers.base_sampler import BaseSampler, minority_rows
from dpgda.seeding import make_rng
from dpgda.tabular import Dataset, feature_stats


def jitter(train: Dataset, minority_class: int, m: int, sigma_fraction: float = 0.3, seed: int = 0) -> np.ndarray:
    """
    Random minority rows plus Gaussian noise with per-feature sigma
    ``sigma_fraction * range``. Nothing is clipped, so rows can leave the
    valid domain: this is the baseline that makes violations visible.
    """
    rows = minority_rows(train, minority_class)
    sigma = sigma_fraction * feature_stats(train).range
    rng = make_rng(seed, "jitter")
    base = rows[rng.integers(0, rows.shape[0], size=m)]
    return base + rng.standard_normal(base.shape) * sigma


class JitterSampler(BaseSampler):
    name = "jitter"

    def __init__(self, sigma_fraction: float = 0.3):
        self.sigma_fraction = sigma_fraction

    def sample(self, train, minority_class, m, seed):
        return jitter(train, minority_class, m, self.sigma_fraction, seed)
