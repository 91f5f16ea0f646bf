# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
SMOTE: every synthetic row lies on the segment between a random minority
sample and one of its k nearest minority neighbours.
"""

import numpy as np
from scipy.spatial.distance import cdist

from dpgda.errors import DatasetError
from dpgda.samplers.base_sampler import BaseSampler, minority_rows
from dpgda.seeding import make_rng
from dpgda.tabular import Dataset


def nearest_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest other points (Euclidean), ties by lowest index."""
    distances = cdist(points, points)
    np.fill_diagonal(distances, np.inf)
    return np.argsort(distances, axis=1, kind="stable")[:, :k]


def smote_interpolate(base: np.ndarray, neighbor: np.ndarray, lam) -> np.ndarray:
    """``base + lam * (neighbor - base)``; `lam` broadcasts per row."""
    lam = np.asarray(lam, dtype=np.float64)
    if lam.ndim == 1:
        lam = lam[:, None]
    return base + lam * (neighbor - base)


def smote(train: Dataset, minority_class: int, m: int, k: int = 5, seed: int = 0) -> np.ndarray:
    rows = minority_rows(train, minority_class)
    if rows.shape[0] < 2:
        raise DatasetError("SMOTE needs at least two minority samples")
    if k > rows.shape[0] - 1:
        raise DatasetError(f"k_neighbors={k} but only {rows.shape[0]} minority samples; "
                           f"use k_neighbors <= {rows.shape[0] - 1}")
    neighbors = nearest_neighbors(rows, k)
    rng = make_rng(seed, "smote")
    base = rng.integers(0, rows.shape[0], size=m)
    chosen = neighbors[base, rng.integers(0, k, size=m)]
    lam = rng.random(m)
    return smote_interpolate(rows[base], rows[chosen], lam)


class SmoteSampler(BaseSampler):
    name = "smote"

    def __init__(self, k_neighbors: int = 5):
        self.k_neighbors = k_neighbors

    def sample(self, train, minority_class, m, seed):
        return smote(train, minority_class, m, self.k_neighbors, seed)
