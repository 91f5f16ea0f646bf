# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import math

import numpy as np
import pandas as pd
import pytest

from dpgda.bench import (RESULT_COLUMNS, BenchDataset, ablation_grid, aggregate_scores, load_benchmark_datasets,
                         plan_cells, read_results, run_benchmark, runtime_summary, scores_for_ranking,
                         write_results)
from dpgda.config import BenchConfig, SplitSpec
from dpgda.constraints import write_rules_json
from dpgda.errors import DatasetError, StatisticsError
from dpgda.tabular import write_csv

from conftest import make_imbalanced


@pytest.fixture
def bench(imbalanced, box_rules):
    return [BenchDataset("toy", imbalanced, tuple(box_rules))]


def _cfg(**changes) -> BenchConfig:
    base = dict(methods=("ros",), levels=(0.3, 0.4, 0.5), reps=2, classifiers=("knn",), timing=False)
    base.update(changes)
    return BenchConfig(**base)


def test_row_count_per_protocol(bench):
    results = run_benchmark(bench, _cfg(reps=10, classifiers=("decision_tree", "knn", "logistic_regression")))
    assert len(results) == 90
    assert list(results.columns) == RESULT_COLUMNS
    assert (results["status"] == "ok").all()


def test_control_runs_once_per_repetition(bench):
    cells = plan_cells(bench, _cfg(methods=("ros", "none")))
    assert len(cells) == 3 * 2 + 2
    assert [c.level for c in cells if c.method == "none"] == [0.0, 0.0]
    assert [c.index for c in cells] == list(range(len(cells)))


def test_results_are_byte_identical(tmp_path, bench):
    cfg = _cfg(methods=("ros", "smote", "jitter", "none"))
    first = write_results(run_benchmark(bench, cfg), tmp_path / "a.csv")
    second = write_results(run_benchmark(bench, cfg), tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_results_do_not_depend_on_jobs(tmp_path, bench):
    cfg = _cfg(methods=("ros", "smote", "none"))
    serial = write_results(run_benchmark(bench, cfg), tmp_path / "serial.csv")
    parallel = write_results(run_benchmark(bench, cfg.model_copy(update={"jobs": 2})), tmp_path / "parallel.csv")
    assert serial.read_bytes() == parallel.read_bytes()


def test_methods_see_the_same_split(bench):
    # split seeds depend on dataset and repetition only
    results = run_benchmark(bench, _cfg(methods=("none", "none"), reps=1))
    assert results["f1"].iloc[0] == results["f1"].iloc[1]


def test_violation_rates(bench, imbalanced):
    results = run_benchmark(bench + [BenchDataset("plain", imbalanced)], _cfg(methods=("ros",), reps=1))
    assert (results.loc[results["dataset"] == "toy", "violation_rate"] == 0.0).all()
    assert results.loc[results["dataset"] == "plain", "violation_rate"].isna().all()


def test_failed_cell_is_recorded(bench):
    results = run_benchmark(bench, _cfg(methods=("smote",), k_neighbors=50, reps=1))
    assert (results["status"] == "failed:DatasetError").all()
    assert results["f1"].isna().all()


def test_dpgda_cell_has_no_violations(bench, tiny_pipeline):
    results = run_benchmark(bench, _cfg(methods=("dpgda",), levels=(0.4,), reps=1, pipeline=tiny_pipeline))
    assert results["status"].tolist() == ["ok"]
    assert results["violation_rate"].tolist() == [0.0]


def test_aggregate_scores_average_levels_then_methods(bench):
    results = run_benchmark(bench, _cfg(methods=("ros", "smote"), classifiers=("knn", "decision_tree")))
    table = aggregate_scores(results)
    assert list(table.columns) == ["ros", "smote"]
    ros = results[results["method"] == "ros"]
    expected = ros.groupby("level")["f1"].mean().mean()
    assert table.loc["toy", "ros"] == pytest.approx(expected)


def test_runtime_summary_has_one_value_per_method(bench):
    results = run_benchmark(bench, _cfg(methods=("ros", "smote"), timing=True))
    summary = runtime_summary(results)
    assert list(summary.columns) == ["ros", "smote"]
    assert (summary.to_numpy() >= 0).all()


def test_timed_runs_differ_only_in_runtime(bench):
    cfg = _cfg(methods=("ros", "jitter"), reps=1, timing=True)
    first, second = run_benchmark(bench, cfg), run_benchmark(bench, cfg)
    assert (first["runtime_s"] >= 0).all()
    others = [column for column in RESULT_COLUMNS if column != "runtime_s"]
    pd.testing.assert_frame_equal(first[others], second[others])
    untimed = run_benchmark(bench, cfg.model_copy(update={"timing": False}))
    assert (untimed["runtime_s"] == 0.0).all()
    pd.testing.assert_frame_equal(untimed[others], first[others])


def test_ranking_refuses_failed_cells(bench):
    results = run_benchmark(bench, _cfg(methods=("ros", "smote"), k_neighbors=50, reps=1))
    with pytest.raises(StatisticsError):
        scores_for_ranking(results)


def test_results_file_round_trip(tmp_path, bench):
    results = run_benchmark(bench, _cfg(reps=1))
    restored = read_results(write_results(results, tmp_path / "results.csv"))
    assert list(restored.columns) == RESULT_COLUMNS
    np.testing.assert_allclose(restored["f1"], results["f1"])


def test_dataset_directory(tmp_path, box_rules):
    write_csv(make_imbalanced(seed=1), tmp_path / "b.csv")
    write_csv(make_imbalanced(seed=2), tmp_path / "a.csv")
    write_rules_json(box_rules, tmp_path / "a.rules.json")
    datasets = load_benchmark_datasets(tmp_path)
    assert [d.name for d in datasets] == ["a", "b"]
    assert datasets[0].rules is not None and datasets[1].rules is None
    with pytest.raises(DatasetError):
        load_benchmark_datasets(tmp_path / "missing")


def test_ablation_grid_covers_all_27_triples(bench, tiny_pipeline):
    cfg = _cfg(methods=("dpgda",), levels=(0.4,), reps=1, pipeline=tiny_pipeline, split=SplitSpec(seed=2))
    table = ablation_grid(bench, cfg)
    assert len(table) == 27
    assert table["rank"].tolist() == list(range(1, 28))
    triples = set(zip(table["w1"], table["w2"], table["w3"]))
    assert len(triples) == 27
    assert (2.0, 1.0, 3.0) in triples


def test_ablation_grid_ranks_every_triple(bench, tiny_pipeline):
    cfg = _cfg(methods=("dpgda",), levels=(0.4,), reps=1, pipeline=tiny_pipeline, split=SplitSpec(seed=1))
    table = ablation_grid(bench, cfg, values=(1.0, 2.0))
    assert len(table) == 8
    assert list(table.columns) == ["rank", "w1", "w2", "w3", "mean_f1", "failed_rows"]
    assert table["rank"].tolist() == list(range(1, 9))
    scores = table["mean_f1"].tolist()
    assert all(not math.isnan(s) for s in scores)
    assert scores == sorted(scores, reverse=True)
