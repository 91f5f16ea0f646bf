# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
End-to-end minority oversampling: surrogate on an internal holdout of the
training data, DPG and class bounds from the same holdout, then one genetic
search per query sample until the requested minority share is reached.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from dpgda.config import PipelineConfig, SplitSpec
from dpgda.dpg.bounds import ClassBounds, export_constraints, extract_class_bounds
from dpgda.dpg.graph import DPGraph, build_dpg
from dpgda.errors import ConfigError
from dpgda.evolution.genetic import GeneticSearch
from dpgda.evolution.trace import Trace
from dpgda.seeding import derive_seed, make_rng
from dpgda.surrogate.forest import Forest, train_forest
from dpgda.tabular import Dataset, holdout_split

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class AugmentationResult:
    augmented: Dataset
    minority_class: int
    n_required: int
    synthetic: np.ndarray
    traces: List[Trace] = field(default_factory=list)
    bounds: Optional[ClassBounds] = None
    constraints: Optional[dict] = None
    forest: Optional[Forest] = None
    dpg: Optional[DPGraph] = None
    # training row behind every synthetic sample
    query_rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n_synthetic(self) -> int:
        return int(self.synthetic.shape[0])


def required_synthetic(n_minority: int, n_other: int, level: float) -> int:
    """
    Synthetic rows needed for the minority to make up `level` of the data:
    ``ceil(level * n_other / (1 - level)) - n_minority``, never negative.
    """
    if not 0.0 < level < 1.0:
        raise ConfigError(f"augmentation level must lie in (0, 1), got {level}", "level")
    # strip float noise before ceil: 0.15 * 85 / 0.85 must give 15
    target = math.ceil(round(level * n_other / (1.0 - level), 9))
    return max(0, target - n_minority)


def fit_surrogate(train: Dataset, pipeline: PipelineConfig, seed: int) -> Tuple[Forest, DPGraph, ClassBounds]:
    """Forest, DPG and class bounds, all from the internal holdout of `train`."""
    split = SplitSpec(holdout_fraction=pipeline.holdout_fraction, seed=derive_seed(seed, "holdout"))
    holdout, _ = holdout_split(train, split)
    forest_cfg = pipeline.forest.model_copy(update={"seed": derive_seed(seed, "forest", pipeline.forest.seed)})
    forest = train_forest(holdout, forest_cfg)
    dpg = build_dpg(forest, holdout, pipeline.dpg.quantize_decimals, jobs=forest_cfg.jobs)
    bounds = extract_class_bounds(dpg, forest, holdout, pipeline.dpg.min_support, enclose=pipeline.dpg.enclose)
    return forest, dpg, bounds


# per-process state for parallel queries, set once by the pool initializer
_WORKER: dict = {}


def _init_worker(minority_class, bounds, forest, pipeline, feature_names):
    _WORKER.update(cls=minority_class, bounds=bounds, forest=forest, pipeline=pipeline, names=feature_names)


def _evolve_query(job) -> Tuple[np.ndarray, Trace]:
    position, row, query, seed = job
    pipeline: PipelineConfig = _WORKER["pipeline"]
    ga = pipeline.ga.model_copy(update={"seed": derive_seed(seed, "query", position, pipeline.ga.seed)})
    search = GeneticSearch(query, _WORKER["cls"], _WORKER["bounds"], _WORKER["forest"], ga, pipeline.weights,
                           _WORKER["forest"].stats)
    return search.evolve(query_index=row, feature_names=_WORKER["names"])


def augment_dataset(train: Dataset, minority_class: int, level: float, pipeline: PipelineConfig = PipelineConfig(),
                    seed: int = 0, jobs: int = 1) -> AugmentationResult:
    """
    Oversamples `minority_class` of `train` up to the share `level`.

    Args:
        train (Dataset): Training data only; test rows must never reach here.
        minority_class (int): Class id to oversample.
        level (float): Target minority proportion of the augmented data, in (0, 1).
        pipeline (PipelineConfig): Forest, DPG, GA and fitness settings.
        seed (int): Master seed; every stage and every query derives from it.
        jobs (int): Worker processes for the per-query searches. Results do
            not depend on it.

    Returns:
        AugmentationResult: `augmented` is `train` followed by the accepted
        samples in query order.

    Raises:
        InfeasibleAugmentation: A query found no valid, in-bounds candidate.
    """
    counts = train.class_counts()
    if not 0 <= minority_class < train.n_classes:
        raise ConfigError(f"unknown minority class id {minority_class}", "minority")
    n_minority = int(counts[minority_class])
    n_required = required_synthetic(n_minority, train.n_samples - n_minority, level)
    if n_required == 0:
        logger.info("minority share %.4f already reaches level %.4f; training data left unchanged",
                    n_minority / max(train.n_samples, 1), level)
        return AugmentationResult(train, minority_class, 0, np.zeros((0, train.n_features)))
    return synthesize_minority(train, minority_class, n_required, pipeline, seed, jobs)


def synthesize_minority(train: Dataset, minority_class: int, m: int, pipeline: PipelineConfig = PipelineConfig(),
                        seed: int = 0, jobs: int = 1) -> AugmentationResult:
    """
    Evolves exactly `m` synthetic rows of `minority_class` and appends them
    to `train`. Same seeds as `augment_dataset` for the same `m`.
    """
    if not 0 <= minority_class < train.n_classes:
        raise ConfigError(f"unknown minority class id {minority_class}", "minority")
    if m < 0:
        raise ConfigError(f"synthetic row count must be >= 0, got {m}", "m")
    if m == 0:
        return AugmentationResult(train, minority_class, 0, np.zeros((0, train.n_features)))
    n_required = int(m)
    if not np.any(train.labels == minority_class):
        raise ConfigError(f"class '{train.class_names[minority_class]}' has no training samples", "minority")

    forest, dpg, bounds = fit_surrogate(train, pipeline, seed)
    constraints = export_constraints(bounds, train.feature_names, train.class_names)

    members = np.flatnonzero(train.labels == minority_class)
    rows = members[make_rng(seed, "queries").integers(0, members.size, size=n_required)]
    jobs_list = [(position, int(row), train.features[row], seed) for position, row in enumerate(rows)]
    init_args = (minority_class, bounds, forest, pipeline, train.feature_names)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=init_args) as pool:
            outcomes = list(pool.map(_evolve_query, jobs_list, chunksize=max(1, len(jobs_list) // (4 * jobs))))
    else:
        _init_worker(*init_args)
        outcomes = [_evolve_query(job) for job in jobs_list]

    synthetic = np.vstack([sample for sample, _ in outcomes])
    traces = [trace for _, trace in outcomes]
    augmented = train.with_rows(synthetic, minority_class)
    logger.info("augmented class '%s': %d synthetic rows, %d -> %d samples", train.class_names[minority_class],
                n_required, train.n_samples, augmented.n_samples)
    return AugmentationResult(augmented, minority_class, n_required, synthetic, traces, bounds, constraints,
                              forest, dpg, rows.astype(np.int64))
