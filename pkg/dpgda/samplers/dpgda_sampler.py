# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np

from dpgda.config import PipelineConfig
from dpgda.evolution.augmentor import AugmentationResult, augment_dataset, synthesize_minority
from dpgda.samplers.base_sampler import BaseSampler
from dpgda.tabular import Dataset


class DPGSampler(BaseSampler):
    """Constraint-aware genetic oversampling behind the common sampler interface."""
    name = "dpgda"

    def __init__(self, pipeline: PipelineConfig = PipelineConfig(), jobs: int = 1):
        self.pipeline = pipeline
        self.jobs = jobs

    def augment(self, train: Dataset, minority_class: int, level: float, seed: int) -> AugmentationResult:
        # keeps traces, bounds and the surrogate on the result
        return augment_dataset(train, minority_class, level, self.pipeline, seed, self.jobs)

    def sample(self, train: Dataset, minority_class: int, m: int, seed: int) -> np.ndarray:
        return synthesize_minority(train, minority_class, m, self.pipeline, seed, self.jobs).synthetic


class NoAugmentation(BaseSampler):
    """Control arm: the training data as it is."""
    name = "none"

    def augment(self, train, minority_class, level, seed):
        return AugmentationResult(train, minority_class, 0, np.zeros((0, train.n_features)))

    def sample(self, train, minority_class, m, seed):
        return np.zeros((0, train.n_features))
