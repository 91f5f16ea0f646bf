# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np
import pytest

from dpgda.config import SamplerSpec
from dpgda.constraints import DomainRule, audit
from dpgda.datagen import generate_domain, load_domain_config
from dpgda.errors import DatasetError
from dpgda.evolution import required_synthetic
from dpgda.samplers import (DPGSampler, JitterSampler, NoAugmentation, RandomOverSampler, SmoteSampler,
                            build_sampler, jitter, nearest_neighbors, ros, smote, smote_interpolate)
from dpgda.tabular import Dataset


def _near_zero() -> Dataset:
    rng = np.random.default_rng(4)
    majority = rng.uniform(2.0, 10.0, size=(40, 1))
    minority = rng.uniform(0.0, 0.5, size=(10, 1))
    return Dataset(np.vstack([majority, minority]), [0] * 40 + [1] * 10, ("amount",), ("a", "b"))


def test_ros_copies_minority_rows(imbalanced):
    rows = ros(imbalanced, 1, 30, seed=2)
    minority = {tuple(row) for row in imbalanced.rows_of(1)}
    assert rows.shape == (30, 2)
    assert all(tuple(row) in minority for row in rows)


def test_ros_is_seeded(imbalanced):
    np.testing.assert_array_equal(ros(imbalanced, 1, 10, seed=1), ros(imbalanced, 1, 10, seed=1))


def test_smote_interpolate_endpoints():
    base, neighbor = np.array([[0.0, 0.0]]), np.array([[2.0, 4.0]])
    np.testing.assert_array_equal(smote_interpolate(base, neighbor, [0.0]), base)
    np.testing.assert_array_equal(smote_interpolate(base, neighbor, [1.0]), neighbor)
    np.testing.assert_array_equal(smote_interpolate(base, neighbor, [0.5]), [[1.0, 2.0]])


@pytest.mark.parametrize("seed", range(5))
def test_smote_stays_inside_segment(seed):
    rng = np.random.default_rng(seed)
    base, neighbor = rng.normal(size=(50, 3)), rng.normal(size=(50, 3))
    out = smote_interpolate(base, neighbor, rng.random(50))
    assert (out >= np.minimum(base, neighbor) - 1e-12).all()
    assert (out <= np.maximum(base, neighbor) + 1e-12).all()


def test_nearest_neighbors_break_ties_by_index():
    points = np.array([[0.0], [1.0], [-1.0], [2.0]])
    np.testing.assert_array_equal(nearest_neighbors(points, 2)[0], [1, 2])


def test_smote_keeps_box_rules(imbalanced, box_rules):
    rows = smote(imbalanced, 1, 200, k=5, seed=3)
    synthetic = Dataset(rows, np.ones(200), imbalanced.feature_names, imbalanced.class_names)
    assert audit(synthetic, box_rules).violation_rate == 0.0


def test_smote_rejects_large_k(imbalanced):
    with pytest.raises(DatasetError):
        smote(imbalanced, 1, 5, k=20)


def test_jitter_breaks_nonnegative_rule():
    ds = _near_zero()
    rows = jitter(ds, 1, 1000, sigma_fraction=0.3, seed=0)
    synthetic = Dataset(rows, np.ones(1000), ds.feature_names, ds.class_names)
    assert audit(synthetic, [DomainRule(feature="amount", lower=0.0)]).violation_rate > 0.1


def test_augment_adds_required_rows(imbalanced):
    result = RandomOverSampler().augment(imbalanced, 1, 0.5, seed=0)
    assert result.n_synthetic == 40
    assert result.augmented.class_counts().tolist() == [60, 60]


def test_no_augmentation_returns_training_data(imbalanced):
    result = NoAugmentation().augment(imbalanced, 1, 0.5, seed=0)
    assert result.augmented is imbalanced
    assert result.n_synthetic == 0


def test_build_sampler_by_kind(tiny_pipeline):
    assert isinstance(build_sampler(SamplerSpec(kind="ros")), RandomOverSampler)
    assert build_sampler(SamplerSpec(kind="smote", k_neighbors=3)).k_neighbors == 3
    assert build_sampler(SamplerSpec(kind="jitter", sigma_fraction=0.1)).sigma_fraction == 0.1
    assert isinstance(build_sampler(SamplerSpec(kind="none")), NoAugmentation)
    sampler = build_sampler(SamplerSpec(kind="dpgda"), tiny_pipeline)
    assert isinstance(sampler, DPGSampler)
    assert sampler.pipeline is tiny_pipeline


def test_baseline_samplers_share_interface(imbalanced):
    for sampler in (RandomOverSampler(), SmoteSampler(3), JitterSampler(0.2)):
        result = sampler.augment(imbalanced, 1, 0.4, seed=5)
        assert result.augmented.n_samples == 100
        assert result.synthetic.shape == (20, 2)


def test_dpg_sampler_sample_matches_augment(imbalanced, tiny_pipeline):
    sampler = DPGSampler(tiny_pipeline)
    rows = sampler.sample(imbalanced, 1, 20, seed=3)
    assert rows.shape == (20, 2)
    np.testing.assert_array_equal(rows, sampler.augment(imbalanced, 1, 0.4, seed=3).synthetic)
    assert sampler.sample(imbalanced, 1, 0, seed=3).shape == (0, 2)


@pytest.mark.parametrize("name, ratio", [("healthcare", None), ("finance", "4:1")])
def test_baselines_on_generated_domains(name, ratio):
    ds, rules = generate_domain(load_domain_config(name, ratio), seed=0)
    n_minority = int(ds.class_counts()[1])
    m = required_synthetic(n_minority, ds.n_samples - n_minority, 0.5)
    assert m > 0

    def rate(rows):
        return audit(Dataset(rows, np.ones(m), ds.feature_names, ds.class_names), rules).violation_rate

    assert rate(jitter(ds, 1, m, seed=0)) > 0.01
    assert rate(ros(ds, 1, m, seed=0)) == 0.0
    assert rate(smote(ds, 1, m, seed=0)) == 0.0
