# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import math

import numpy as np
import pytest
from pydantic import ValidationError

from dpgda.config import FitnessWeights, ForestConfig, GAConfig
from dpgda.constraints import audit
from dpgda.dpg import bounds_from_mapping, build_dpg, check_bounds, extract_class_bounds
from dpgda.errors import ConfigError, InfeasibleAugmentation
from dpgda.evolution import (GeneticSearch, Trace, augment_dataset, evolve, fit_surrogate, fitness, fitness_batch,
                             load_trace, required_synthetic, sparsity_epsilon)
from dpgda.seeding import make_rng
from dpgda.surrogate import DecisionTree, train_forest
from dpgda.surrogate.forest import Forest
from dpgda.tabular import Dataset, FeatureStats

SMALL_GA = GAConfig(population_size=12, max_generations=15, plateau_patience=4)


def _stump() -> Forest:
    # x0 <= 5 -> class 0, else class 1
    tree = DecisionTree(feature=[0, -1, -1], threshold=[5.0, 0.0, 0.0], left=[1, -1, -1], right=[2, -1, -1],
                        class_counts=[[5, 5], [5, 0], [0, 5]], n_features=2)
    stats = FeatureStats(np.array([0.0, 0.0]), np.array([10.0, 10.0]))
    return Forest((tree,), ForestConfig(n_trees=1), 2, 2, stats)


def _surrogate(ds: Dataset, cfg: ForestConfig):
    forest = train_forest(ds, cfg)
    bounds = extract_class_bounds(build_dpg(forest, ds), forest, ds)
    return forest, bounds


# ---------------------------------------------------------------- fitness


def test_identity_candidate_scores_w1_plus_w3():
    forest = _stump()
    bounds = bounds_from_mapping({1: {0: (5.0, 10.0)}}, 2)
    query = np.array([7.0, 3.0])
    candidate = fitness(query, query, bounds, 1, forest, FitnessWeights(), forest.stats)
    assert (candidate.V, candidate.A, candidate.D, candidate.S) == (1, 1.0, 0.0, 0.0)
    assert candidate.fitness == 5.0


def test_invalid_candidate_scores_zero():
    forest = _stump()
    bounds = bounds_from_mapping({1: {0: (5.0, 10.0)}}, 2)
    candidate = fitness([2.0, 3.0], [7.0, 3.0], bounds, 1, forest, FitnessWeights(), forest.stats)
    assert candidate.V == 0
    assert candidate.fitness == 0.0


def test_distance_is_capped_and_sparsity_counts_moves():
    forest = _stump()
    bounds = bounds_from_mapping({1: {}}, 2)
    candidate = fitness([9.0, 3.0], [6.0, 3.0], bounds, 1, forest, FitnessWeights(), forest.stats)
    assert candidate.D == pytest.approx(0.3 / math.sqrt(2))
    assert candidate.S == 0.5
    far = fitness([1e6, 1e6], [6.0, 3.0], bounds, 1, forest, FitnessWeights(), forest.stats)
    assert far.D == 1.0


def test_constant_feature_gets_tiny_tolerance():
    eps = sparsity_epsilon(FeatureStats(np.array([0.0, 2.0]), np.array([10.0, 2.0])), 1e-3)
    np.testing.assert_allclose(eps, [1e-2, 1e-12])


@pytest.mark.parametrize("seed", range(10))
def test_components_stay_in_unit_interval(seed, imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    X = make_rng(seed, "population").uniform(-20, 30, size=(40, 2))
    scores, parts = fitness_batch(X, imbalanced.rows_of(1)[0], bounds, 1, forest, FitnessWeights(), forest.stats)
    for values in (parts.A, parts.D, parts.S):
        assert ((values >= 0) & (values <= 1)).all()
    assert (scores[parts.V == 0] == 0).all()


def test_weights_reject_all_zero():
    with pytest.raises(ValidationError):
        FitnessWeights(w1=0, w2=0, w3=0)


def test_weights_parse():
    assert FitnessWeights.parse("1,2,3").as_tuple() == (1.0, 2.0, 3.0)
    with pytest.raises(ConfigError):
        FitnessWeights.parse("1,2")


# ---------------------------------------------------------------- genetic search


@pytest.mark.parametrize("seed", range(100))
def test_best_fitness_never_decreases(seed, imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    query = imbalanced.rows_of(1)[seed % 20]
    ga = SMALL_GA.model_copy(update={"seed": seed, "max_generations": 25, "plateau_patience": 25})
    search = GeneticSearch(query, 1, bounds, forest, ga, FitnessWeights(), forest.stats)
    _, records = search.run(make_rng(seed, "test"))
    best = [record.best.fitness for record in records]
    assert all(later >= earlier for earlier, later in zip(best, best[1:]))


@pytest.mark.parametrize("seed", range(100))
def test_accepted_sample_is_valid_and_inside_bounds(seed, imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    query = imbalanced.rows_of(1)[seed % 20]
    sample, trace = evolve(query, 1, bounds, forest, SMALL_GA.model_copy(update={"seed": seed}))
    assert forest.predict(sample) == 1
    assert check_bounds(bounds, 1, sample).satisfied
    np.testing.assert_array_equal(trace.accepted, sample)
    assert 1 <= len(trace) <= SMALL_GA.max_generations


def test_evolve_is_deterministic(imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    query = imbalanced.rows_of(1)[0]
    first, _ = evolve(query, 1, bounds, forest, SMALL_GA)
    second, _ = evolve(query, 1, bounds, forest, SMALL_GA)
    np.testing.assert_array_equal(first, second)


def test_plateau_stops_early(imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    ga = SMALL_GA.model_copy(update={"max_generations": 500, "plateau_patience": 3})
    _, trace = evolve(imbalanced.rows_of(1)[0], 1, bounds, forest, ga)
    assert len(trace) < 500


def test_unreachable_class_is_infeasible():
    forest = _stump()
    # the box only admits x0 <= 4, where the surrogate never predicts class 1
    bounds = bounds_from_mapping({1: {0: (0.0, 4.0)}}, 2)
    with pytest.raises(InfeasibleAugmentation) as info:
        evolve([7.0, 3.0], 1, bounds, forest, SMALL_GA.model_copy(update={"retries_on_infeasible": 1}),
               query_index=4)
    assert info.value.attempts == 2
    assert info.value.query_index == 4


def test_trace_deltas_telescope(imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    query = imbalanced.rows_of(1)[3]
    _, trace = evolve(query, 1, bounds, forest, SMALL_GA)
    np.testing.assert_allclose(trace.deltas().sum(axis=0), trace.final() - query, atol=1e-9)


def test_trace_files_round_trip(tmp_path, imbalanced, tiny_forest_cfg):
    forest, bounds = _surrogate(imbalanced, tiny_forest_cfg)
    _, trace = evolve(imbalanced.rows_of(1)[0], 1, bounds, forest, SMALL_GA, query_index=60,
                      feature_names=imbalanced.feature_names)
    json_path, csv_path = trace.save(tmp_path)
    assert json_path.name == "trace_60.json"
    restored = load_trace(json_path)
    np.testing.assert_array_equal(restored.deltas(), trace.deltas())
    assert restored.names() == ["x0", "x1"]
    assert csv_path.read_text().splitlines()[0] == "generation,delta_x0,delta_x1,fitness,V,A,D,S"


# ---------------------------------------------------------------- augmentation


def test_required_synthetic_counts():
    assert required_synthetic(10, 90, 0.5) == 80
    assert required_synthetic(50, 50, 0.3) == 0
    assert required_synthetic(15, 85, 0.15) == 0
    with pytest.raises(ConfigError):
        required_synthetic(10, 90, 1.0)


def test_augmentation_reaches_level(imbalanced, tiny_pipeline, box_rules):
    result = augment_dataset(imbalanced, 1, 0.4, tiny_pipeline, seed=3)
    # ceil(0.4 * 60 / 0.6) - 20
    assert result.n_synthetic == 20
    assert result.augmented.n_samples == 100
    np.testing.assert_array_equal(result.augmented.features[:80], imbalanced.features)
    assert (result.augmented.row_ids[80:] == -1).all()
    assert (result.augmented.labels[80:] == 1).all()
    assert len(result.traces) == 20
    synthetic = Dataset(result.synthetic, np.ones(20), imbalanced.feature_names, imbalanced.class_names)
    assert audit(synthetic, box_rules).violation_rate == 0.0
    for row in result.synthetic:
        assert check_bounds(result.bounds, 1, row).satisfied
        assert result.forest.predict(row) == 1


def test_augmentation_is_deterministic_across_jobs(imbalanced, tiny_pipeline):
    serial = augment_dataset(imbalanced, 1, 0.35, tiny_pipeline, seed=9)
    parallel = augment_dataset(imbalanced, 1, 0.35, tiny_pipeline, seed=9, jobs=2)
    np.testing.assert_array_equal(serial.synthetic, parallel.synthetic)
    np.testing.assert_array_equal(serial.query_rows, parallel.query_rows)


def test_augmentation_noop_when_level_already_met(imbalanced, tiny_pipeline):
    result = augment_dataset(imbalanced, 1, 0.2, tiny_pipeline)
    assert result.n_synthetic == 0
    assert result.augmented is imbalanced
    assert result.traces == []


def test_surrogate_sees_holdout_only(imbalanced, tiny_pipeline):
    forest, dpg, bounds = fit_surrogate(imbalanced, tiny_pipeline, seed=1)
    # 0.8 of 60 and 0.8 of 20
    assert dpg.n_paths == forest.n_trees * 64
    assert bounds.classes == [0, 1]


def test_constraints_document_is_attached(imbalanced, tiny_pipeline):
    result = augment_dataset(imbalanced, 1, 0.4, tiny_pipeline, seed=3)
    assert set(result.constraints["class_bounds"]) == {"major", "minor"}


def test_trace_without_records_reports_query():
    trace = Trace(np.array([1.0, 2.0]), 1)
    np.testing.assert_array_equal(trace.final(), [1.0, 2.0])
    assert trace.deltas().shape == (0, 2)
