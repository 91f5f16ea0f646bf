# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Real-valued genetic search for one synthetic sample.

The population starts uniformly inside the class box (open sides clipped to
the observed training range), then each generation keeps the elites and
fills the rest with tournament-selected parents recombined by uniform
crossover and perturbed by per-gene Gaussian mutation. Mutated genes are
not clipped against finite bounds: candidates may leave the box and are
penalised through the adherence term. Open sides stay clipped to the
observed training range. The sample handed back is the fittest candidate
seen that is both valid and fully inside the box.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from dpgda.config import FitnessWeights, GAConfig
from dpgda.dpg.bounds import ClassBounds, check_bounds
from dpgda.errors import DatasetError, InfeasibleAugmentation
from dpgda.evolution.fitness import Candidate, fitness_batch, sparsity_epsilon
from dpgda.evolution.trace import Trace, TraceRecord
from dpgda.seeding import make_rng
from dpgda.surrogate.forest import Forest
from dpgda.tabular import FeatureStats

logger = logging.getLogger(__name__)


def search_box(bounds: ClassBounds, cls: int, stats: FeatureStats) -> Tuple[np.ndarray, np.ndarray]:
    """Class box with every open side replaced by the observed training extreme."""
    lower, upper = bounds.arrays(cls)
    low = np.where(np.isfinite(lower), lower, np.minimum(stats.minimum, upper))
    high = np.where(np.isfinite(upper), upper, np.maximum(stats.maximum, lower))
    return low, high


class GeneticSearch:
    """
    One query, one class, one surrogate. `run` performs a single attempt;
    `evolve` adds the restart policy.
    """

    def __init__(self, query: Sequence[float], cls: int, bounds: ClassBounds, forest: Forest, cfg: GAConfig,
                 w: FitnessWeights, stats: FeatureStats):
        self.query = np.asarray(query, dtype=np.float64)
        if self.query.shape != (forest.n_features,):
            raise DatasetError(f"query has {self.query.size} features, the surrogate expects {forest.n_features}")
        self.cls = int(cls)
        self.bounds = bounds
        self.forest = forest
        self.cfg = cfg
        self.w = w
        self.stats = stats
        self.low, self.high = search_box(bounds, cls, stats)
        lower, upper = bounds.arrays(cls)
        self.open_low = ~np.isfinite(lower)
        self.open_high = ~np.isfinite(upper)
        self.sigma = cfg.mutation_sigma_fraction * (self.high - self.low)
        self.eps = sparsity_epsilon(stats, cfg.sparsity_epsilon_fraction)

    def _evaluate(self, population: np.ndarray):
        return fitness_batch(population, self.query, self.bounds, self.cls, self.forest, self.w, self.stats,
                             self.eps)

    def _candidate(self, population, scores, parts, i: int) -> Candidate:
        return Candidate(population[i].copy(), float(scores[i]), int(parts.V[i]), float(parts.A[i]),
                         float(parts.D[i]), float(parts.S[i]))

    def _tournament(self, scores: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        size = min(self.cfg.tournament_size, scores.shape[0])
        entrants = rng.integers(0, scores.shape[0], size=(n, size))
        return entrants[np.arange(n), np.argmax(scores[entrants], axis=1)]

    def _next_generation(self, population, scores, rng: np.random.Generator) -> np.ndarray:
        cfg = self.cfg
        n, d = population.shape
        elites = population[np.argsort(-scores, kind="stable")[:cfg.elitism_count]]
        n_children = n - cfg.elitism_count

        first = population[self._tournament(scores, n_children, rng)]
        second = population[self._tournament(scores, n_children, rng)]
        crossed = rng.random(n_children) < cfg.crossover_rate
        take_second = (rng.random((n_children, d)) < 0.5) & crossed[:, None]
        children = np.where(take_second, second, first)

        mutate = rng.random((n_children, d)) < cfg.mutation_rate
        noise = rng.standard_normal((n_children, d)) * self.sigma
        children = children + np.where(mutate, noise, 0.0)
        children = np.where(self.open_low, np.maximum(children, self.low), children)
        children = np.where(self.open_high, np.minimum(children, self.high), children)
        return np.vstack([elites, children])

    def run(self, rng: np.random.Generator) -> Tuple[Optional[Candidate], list]:
        """
        One GA attempt.

        Returns:
            (Candidate or None, list[TraceRecord]): best feasible candidate over
            all generations and one record per generation.
        """
        cfg = self.cfg
        population = rng.uniform(self.low, self.high, size=(cfg.population_size, self.query.shape[0]))
        records = []
        accepted: Optional[Candidate] = None
        previous = self.query
        best_so_far = -math.inf
        stale = 0

        for generation in range(cfg.max_generations):
            if generation > 0:
                population = self._next_generation(population, scores, rng)
            scores, parts = self._evaluate(population)

            best = self._candidate(population, scores, parts, int(np.argmax(scores)))
            violations = tuple(check_bounds(self.bounds, self.cls, best.x).violations)
            records.append(TraceRecord(generation, best, best.x - previous, violations))
            previous = best.x

            feasible = np.flatnonzero((parts.V == 1) & (parts.A == 1.0))
            if feasible.size:
                i = int(feasible[np.argmax(scores[feasible])])
                if accepted is None or scores[i] > accepted.fitness:
                    accepted = self._candidate(population, scores, parts, i)

            if generation > 0 and best.fitness - best_so_far <= cfg.plateau_epsilon:
                stale += 1
            else:
                stale = 0
            best_so_far = max(best_so_far, best.fitness)
            if stale >= cfg.plateau_patience:
                break
        return accepted, records

    def evolve(self, query_index: Optional[int] = None, feature_names: Sequence[str] = ()) -> Tuple[np.ndarray, Trace]:
        attempts = self.cfg.retries_on_infeasible + 1
        for attempt in range(attempts):
            rng = make_rng(self.cfg.seed, "attempt", attempt)
            accepted, records = self.run(rng)
            if accepted is not None:
                trace = Trace(self.query.copy(), self.cls, query_index, tuple(feature_names), records,
                              accepted.x.copy(), attempt + 1)
                logger.debug("query %s accepted after %d generation(s), attempt %d, fitness %.6g",
                             query_index, len(records), attempt + 1, accepted.fitness)
                return accepted.x.copy(), trace
            logger.debug("query %s: no feasible candidate in attempt %d", query_index, attempt + 1)
        raise InfeasibleAugmentation(query_index, attempts)


def evolve(query: Sequence[float], cls: int, bounds: ClassBounds, forest: Forest, cfg: GAConfig = GAConfig(),
           w: FitnessWeights = FitnessWeights(), stats: Optional[FeatureStats] = None,
           query_index: Optional[int] = None, feature_names: Sequence[str] = ()) -> Tuple[np.ndarray, Trace]:
    """
    Evolves one synthetic sample of class `cls` from `query`.

    Args:
        query: The minority sample the search starts from.
        cls (int): Target class id.
        bounds (ClassBounds): Feasible boxes; the one of `cls` is used.
        forest (Forest): Surrogate behind the validity gate.
        cfg (GAConfig): Search parameters and seed.
        w (FitnessWeights): Fitness weights.
        stats (FeatureStats): Training ranges; the surrogate's own by default.
        query_index (int, optional): Provenance reported in traces and errors.

    Returns:
        (np.ndarray, Trace): the accepted sample and the trace of the
        successful attempt.

    Raises:
        InfeasibleAugmentation: No valid, in-bounds candidate after
            `cfg.retries_on_infeasible` restarts.
    """
    stats = forest.stats if stats is None else stats
    return GeneticSearch(query, cls, bounds, forest, cfg, w, stats).evolve(query_index, feature_names)
