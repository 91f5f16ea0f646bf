# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import math

import numpy as np
import pandas as pd
import pytest

from dpgda.bench import NEMENYI_Q_005, critical_difference, friedman_nemenyi, nemenyi_q
from dpgda.errors import StatisticsError


def _table(values, methods=None) -> pd.DataFrame:
    values = np.asarray(values, dtype=np.float64)
    methods = methods or [f"m{j}" for j in range(values.shape[1])]
    return pd.DataFrame(values, index=[f"d{i}" for i in range(values.shape[0])], columns=methods)


def _brute_force(values: np.ndarray):
    n, k = values.shape
    ranks = np.zeros_like(values)
    for i in range(n):
        for j in range(k):
            better = sum(1 for v in values[i] if v > values[i, j])
            ties = sum(1 for v in values[i] if v == values[i, j])
            ranks[i, j] = better + (ties + 1) / 2.0
    mean = ranks.mean(axis=0)
    statistic = 12.0 * n / (k * (k + 1)) * sum(r * r for r in mean) - 3.0 * n * (k + 1)
    cd = NEMENYI_Q_005[k] * math.sqrt(k * (k + 1) / (6.0 * n))
    return mean, max(statistic, 0.0), cd


def test_hand_table():
    scores = _table([[0.9, 0.8, 0.7], [0.85, 0.8, 0.6], [0.7, 0.9, 0.5], [0.95, 0.7, 0.7]], ["a", "b", "c"])
    summary = friedman_nemenyi(scores)
    assert summary.mean_rank == {"a": 1.25, "b": 1.875, "c": 2.875}
    mean, statistic, cd = _brute_force(scores.to_numpy())
    assert summary.statistic == pytest.approx(statistic, abs=1e-9)
    assert summary.critical_difference == pytest.approx(cd, abs=1e-9)
    assert summary.ordered() == ["a", "b", "c"]


@pytest.mark.parametrize("seed", range(20))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    k, n = int(rng.integers(3, 7)), int(rng.integers(2, 11))
    # coarse grid so ties happen
    values = np.round(rng.uniform(0, 1, size=(n, k)), 1)
    summary = friedman_nemenyi(_table(values))
    mean, statistic, cd = _brute_force(values)
    np.testing.assert_allclose([summary.mean_rank[m] for m in summary.methods], mean, atol=1e-12)
    assert summary.statistic == pytest.approx(statistic, abs=1e-9)
    assert summary.critical_difference == pytest.approx(cd, abs=1e-9)


def test_all_tied_table():
    summary = friedman_nemenyi(_table(np.full((5, 4), 0.5)))
    assert summary.statistic == 0.0
    assert summary.p_value == 1.0
    assert set(summary.mean_rank.values()) == {2.5}


def test_median_and_mad():
    summary = friedman_nemenyi(_table([[1, 2, 3], [2, 4, 3], [3, 6, 3]]))
    assert summary.median == {"m0": 2.0, "m1": 4.0, "m2": 3.0}
    assert summary.mad == {"m0": 1.0, "m1": 2.0, "m2": 0.0}


def test_needs_three_methods():
    with pytest.raises(StatisticsError):
        friedman_nemenyi(_table([[1, 2], [2, 1]]))


def test_needs_two_datasets():
    with pytest.raises(StatisticsError):
        friedman_nemenyi(_table([[1, 2, 3]]))


def test_missing_cell_is_named():
    values = np.array([[1.0, 2.0, 3.0], [2.0, np.nan, 1.0]])
    with pytest.raises(StatisticsError, match="m1"):
        friedman_nemenyi(_table(values))


def test_non_tabulated_alpha_uses_studentized_range():
    assert nemenyi_q(3, 0.05) == NEMENYI_Q_005[3]
    assert nemenyi_q(3, 0.10) < nemenyi_q(3, 0.05)
    assert critical_difference(4, 10, 0.10) < critical_difference(4, 10, 0.05)


def test_summary_file(tmp_path):
    summary = friedman_nemenyi(_table([[1, 2, 3], [2, 4, 3], [3, 6, 3]]))
    path = summary.save(tmp_path / "stats.json")
    text = path.read_text()
    assert '"critical_difference"' in text
    assert '"m1"' in text
