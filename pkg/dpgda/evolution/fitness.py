# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Composite fitness of a synthetic candidate ``x_a`` grown from a query ``x_q``::

    fitness = V * (w1 * A + w2 * D + w3 * (1 - S))

V  validity gate: 1 when the surrogate assigns x_a to the target class.
A  adherence: satisfied fraction of the finite bound sides of that class.
D  distance: range-scaled Euclidean distance to x_q divided by sqrt(d), capped at 1.
S  sparsity: fraction of features that moved by more than their tolerance.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from dpgda.config import FitnessWeights
from dpgda.dpg.bounds import ClassBounds, adherence
from dpgda.errors import DatasetError
from dpgda.surrogate.forest import Forest
from dpgda.tabular import FeatureStats

# tolerance for features that never vary in the reference data
CONSTANT_FEATURE_EPS = 1e-12


class FitnessComponents(NamedTuple):
    V: np.ndarray
    A: np.ndarray
    D: np.ndarray
    S: np.ndarray


@dataclass(frozen=True, eq=False)
class Candidate:
    x: np.ndarray
    fitness: float
    V: int
    A: float
    D: float
    S: float

    @property
    def components(self) -> FitnessComponents:
        return FitnessComponents(self.V, self.A, self.D, self.S)

    @property
    def feasible(self) -> bool:
        return self.V == 1 and self.A == 1.0

    def recompute(self, w: FitnessWeights) -> float:
        return combine(self.V, self.A, self.D, self.S, w)


def combine(V, A, D, S, w: FitnessWeights):
    return V * (w.w1 * A + w.w2 * D + w.w3 * (1.0 - S))


def sparsity_epsilon(stats: FeatureStats, fraction: float = 1e-6) -> np.ndarray:
    """Per-feature change tolerance: `fraction` of the range, 1e-12 for constant features."""
    span = stats.range
    return np.where(span > 0, fraction * span, CONSTANT_FEATURE_EPS)


def _scale(stats: FeatureStats) -> np.ndarray:
    span = stats.range
    # constant features contribute no distance
    return np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)


def fitness_batch(X: np.ndarray, x_q: Sequence[float], bounds: ClassBounds, cls: int, forest: Forest,
                  w: FitnessWeights, stats: FeatureStats, eps: Optional[np.ndarray] = None):
    """
    Vectorised fitness of every row of `X`.

    Returns:
        (np.ndarray, FitnessComponents): fitness per row and the V, A, D, S arrays.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    x_q = np.asarray(x_q, dtype=np.float64)
    d = x_q.shape[0]
    if X.shape[1] != d:
        raise DatasetError(f"candidate has {X.shape[1]} features, query has {d}")
    if eps is None:
        eps = sparsity_epsilon(stats)

    V = (forest.predict_many(X) == cls).astype(np.int64)
    A = adherence(bounds, cls, X)
    delta = X - x_q
    D = np.minimum(np.sqrt(np.sum((delta * _scale(stats)) ** 2, axis=1)) / np.sqrt(d), 1.0)
    S = np.count_nonzero(np.abs(delta) > eps, axis=1) / d
    return combine(V, A, D, S, w), FitnessComponents(V, A, D, S)


def fitness(x_a: Sequence[float], x_q: Sequence[float], bounds: ClassBounds, cls: int, forest: Forest,
            w: FitnessWeights, stats: FeatureStats, eps: Optional[np.ndarray] = None) -> Candidate:
    x_a = np.asarray(x_a, dtype=np.float64)
    if x_a.ndim != 1:
        raise DatasetError("fitness expects a single candidate vector")
    values, parts = fitness_batch(x_a, x_q, bounds, cls, forest, w, stats, eps)
    return Candidate(x_a.copy(), float(values[0]), int(parts.V[0]), float(parts.A[0]),
                     float(parts.D[0]), float(parts.S[0]))
