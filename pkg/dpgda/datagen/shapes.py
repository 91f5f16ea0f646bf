# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Two-dimensional imbalanced shapes: the minority class occupies a fixed
geometric region (rectangular sub-clusters, clover petals or a paw print)
and the majority class fills the rest of the bounding box uniformly.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from dpgda.constraints import DomainRule
from dpgda.datagen.domains import class_counts_for
from dpgda.errors import ConfigError
from dpgda.seeding import make_rng
from dpgda.tabular import Dataset

logger = logging.getLogger(__name__)

SHAPE_FEATURES = ("dim1", "dim2")
SHAPE_CLASSES = ("negative", "positive")


@dataclass(frozen=True)
class ShapeGeometry:
    box: Tuple[float, float, float, float]
    inside: Callable[[np.ndarray], np.ndarray]

    @property
    def area(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)


_SUBCLUSTERS = ((40.0, 120.0, 0.0, 300.0), (160.0, 240.0, 500.0, 800.0), (280.0, 360.0, 1000.0, 1300.0))


def _in_subclusters(P: np.ndarray) -> np.ndarray:
    hit = np.zeros(P.shape[0], dtype=bool)
    for x0, x1, y0, y1 in _SUBCLUSTERS:
        hit |= (P[:, 0] >= x0) & (P[:, 0] <= x1) & (P[:, 1] >= y0) & (P[:, 1] <= y1)
    return hit


def _in_clover(P: np.ndarray) -> np.ndarray:
    # four elliptic petals at 45, 135, 225, 315 degrees around the origin
    hit = np.zeros(P.shape[0], dtype=bool)
    for angle in np.deg2rad([45.0, 135.0, 225.0, 315.0]):
        c, s = np.cos(angle), np.sin(angle)
        along = P[:, 0] * c + P[:, 1] * s - 200.0
        across = -P[:, 0] * s + P[:, 1] * c
        hit |= (along / 150.0) ** 2 + (across / 60.0) ** 2 <= 1.0
    return hit


_PAW_DISCS = ((380.0, 420.0, 110.0), (260.0, 650.0, 55.0), (380.0, 720.0, 55.0), (500.0, 650.0, 55.0))


def _in_paw(P: np.ndarray) -> np.ndarray:
    hit = np.zeros(P.shape[0], dtype=bool)
    for cx, cy, r in _PAW_DISCS:
        hit |= (P[:, 0] - cx) ** 2 + (P[:, 1] - cy) ** 2 <= r ** 2
    return hit


SHAPES: Dict[str, ShapeGeometry] = {
    "subclus": ShapeGeometry((0.0, 400.0, -200.0, 1400.0), _in_subclusters),
    "clover": ShapeGeometry((-400.0, 400.0, -400.0, 400.0), _in_clover),
    "paw": ShapeGeometry((100.0, 650.0, 200.0, 900.0), _in_paw),
}


def _geometry(kind: str) -> ShapeGeometry:
    try:
        return SHAPES[kind]
    except KeyError:
        raise ConfigError(f"unknown shape '{kind}', known: {', '.join(SHAPES)}", "kind") from None


def shape_rules(kind: str) -> List[DomainRule]:
    """Bounding-box rules of a shape, one per dimension."""
    x0, x1, y0, y1 = _geometry(kind).box
    return [DomainRule(feature="dim1", lower=x0, upper=x1, description=f"{kind} bounding box"),
            DomainRule(feature="dim2", lower=y0, upper=y1, description=f"{kind} bounding box")]


def _fill(rng: np.random.Generator, geometry: ShapeGeometry, count: int, minority: bool) -> np.ndarray:
    x0, x1, y0, y1 = geometry.box
    points: List[np.ndarray] = []
    have = 0
    while have < count:
        P = np.column_stack([rng.uniform(x0, x1, 4 * count), rng.uniform(y0, y1, 4 * count)])
        P = P[geometry.inside(P) == minority][:count - have]
        points.append(P)
        have += P.shape[0]
    return np.vstack(points)


def generate_shape(kind: str, n: int = 600, ratio: str = "5:1", seed: int = 0, decimals: int = 2) -> Dataset:
    """
    Generates a shape dataset with exact class counts.

    Args:
        kind (str): ``subclus``, ``clover`` or ``paw``.
        n (int): Total number of rows, at least 12.
        ratio (str): Majority to minority ratio, e.g. ``"5:1"``.
        seed (int): Master seed.
        decimals (int): Coordinates are rounded to this many decimals.

    Returns:
        Dataset: Features ``dim1``/``dim2``, classes ``negative`` (majority)
        and ``positive`` (minority), rows shuffled.
    """
    if n < 12:
        raise ConfigError(f"shape datasets need at least 12 rows, got {n}", "n")
    geometry = _geometry(kind)
    n_majority, n_minority = class_counts_for(n, ratio)
    rng = make_rng(seed, "shape", kind)
    majority = _fill(rng, geometry, n_majority, minority=False)
    minority = _fill(rng, geometry, n_minority, minority=True)
    X = np.round(np.vstack([majority, minority]), decimals)
    y = np.concatenate([np.zeros(n_majority, dtype=np.int64), np.ones(n_minority, dtype=np.int64)])
    order = rng.permutation(n)
    ds = Dataset(X[order], y[order], SHAPE_FEATURES, SHAPE_CLASSES)
    logger.debug("generated shape %s: n=%d minority=%d", kind, n, n_minority)
    return ds


if __name__ == "__main__":
    for name in SHAPES:
        data = generate_shape(name, seed=1)
        print(name, data.class_counts(), data.features.min(axis=0), data.features.max(axis=0))
