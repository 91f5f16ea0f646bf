# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from abc import ABC, abstractmethod

import numpy as np

from dpgda.errors import DatasetError
from dpgda.evolution.augmentor import AugmentationResult, required_synthetic
from dpgda.tabular import Dataset


class BaseSampler(ABC):
    """
    The base class for every oversampling method.
    A sampler produces `m` synthetic rows of the minority class from the
    training data; `augment` turns a target minority share into `m` and
    appends the rows.
    """
    name = "base"

    @abstractmethod
    def sample(self, train: Dataset, minority_class: int, m: int, seed: int) -> np.ndarray:
        """
        Generates synthetic minority rows.

        Args:
            train (Dataset): Training data.
            minority_class (int): Class id to oversample.
            m (int): Number of rows to produce.
            seed (int): Seed of this call.

        Returns:
            np.ndarray: Shape (m, d).
        """
        pass

    def augment(self, train: Dataset, minority_class: int, level: float, seed: int) -> AugmentationResult:
        n_minority = int(train.class_counts()[minority_class])
        m = required_synthetic(n_minority, train.n_samples - n_minority, level)
        rows = self.sample(train, minority_class, m, seed) if m else np.zeros((0, train.n_features))
        return AugmentationResult(train.with_rows(rows, minority_class), minority_class, m, rows)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


def minority_rows(train: Dataset, minority_class: int) -> np.ndarray:
    rows = train.rows_of(minority_class)
    if rows.shape[0] == 0:
        raise DatasetError(f"class '{train.class_names[minority_class]}' has no samples to oversample")
    return rows
