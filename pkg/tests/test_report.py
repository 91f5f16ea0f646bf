# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np
import pandas as pd
import pytest

from dpgda.constraints import DomainRule
from dpgda.errors import DatasetError
from dpgda.evolution.fitness import Candidate
from dpgda.evolution.trace import Trace, TraceRecord
from dpgda.report import (VIOLATION_MARK, color_scale, cumulative_change_barplot, delta_frame, delta_table,
                          evolution_heatmap, fmt, pairwise_violation_plot, read_heatmap_values, violation_heatmap,
                          violation_matrix)
from dpgda.tabular import Dataset


def _record(generation, x, delta, violations=()):
    x = np.asarray(x, dtype=np.float64)
    return TraceRecord(generation, Candidate(x, 2.5, 1, 1.0, 0.5, 0.0), np.asarray(delta, dtype=np.float64),
                       violations)


@pytest.fixture
def trace():
    records = [
        _record(0, [1.5, 2.0, 3.0], [0.5, 0.0, 0.0]),
        _record(1, [1.5, 1.0, 3.0], [0.0, -1.0, 0.0], violations=((1, "lower"),)),
        _record(2, [2.0, 1.0, 3.25], [0.5, 0.0, 0.25]),
    ]
    return Trace(np.array([1.0, 2.0, 3.0]), 1, query_index=0, feature_names=("age", "income", "debt"),
                 records=records)


def test_deltas_telescope_to_final_change(trace):
    values, _ = delta_frame(trace)
    np.testing.assert_allclose(values.sum(axis=1).to_numpy(), trace.final() - trace.query, atol=1e-12)
    assert list(values.columns) == ["q->0", "0->1", "1->2"]


def test_delta_table_marks_violations(trace):
    _, flags = delta_frame(trace)
    assert flags.to_numpy().sum() == 1
    assert bool(flags.loc["income", "0->1"])
    figure = delta_table(trace)
    marked = figure.table.set_index("feature")
    assert VIOLATION_MARK in marked.loc["income", "0->1"]
    assert VIOLATION_MARK not in marked.loc["age", "0->1"]
    assert 'data-violation="true"' in figure.svg


def test_heatmap_values_read_back_exactly(trace):
    figure = evolution_heatmap(trace)
    np.testing.assert_array_equal(read_heatmap_values(figure.svg), trace.deltas().T)
    assert list(figure.table.columns) == ["generation", "delta_age", "delta_income", "delta_debt"]


def test_heatmap_needs_a_grid():
    with pytest.raises(DatasetError):
        read_heatmap_values('<svg xmlns="http://www.w3.org/2000/svg"></svg>')


def test_barplot_reports_absolute_change(trace):
    table = cumulative_change_barplot(trace).table
    np.testing.assert_allclose(table["abs_change"], [1.0, 1.0, 0.25])
    assert table["changed_generations"].tolist() == [2, 1, 1]
    assert table["augmented"].tolist() == [2.0, 1.0, 3.25]


def test_empty_trace_is_rejected():
    with pytest.raises(DatasetError):
        evolution_heatmap(Trace(np.zeros(2), 0))


def test_violation_matrix_counts_each_cell_once():
    results = pd.DataFrame({
        "dataset": ["a", "a", "a", "a", "b", "b"],
        "method": ["ros", "ros", "ros", "ros", "ros", "smote"],
        "level": [0.3, 0.3, 0.4, 0.4, 0.3, 0.3],
        "rep": [0, 0, 0, 0, 0, 0],
        "classifier": ["knn", "decision_tree", "knn", "decision_tree", "knn", "knn"],
        "violation_rate": [0.2, 0.2, 0.4, 0.4, 0.0, np.nan],
        "status": ["ok", "ok", "ok", "ok", "ok", "failed:DatasetError"],
    })
    matrix = violation_matrix(results)
    assert matrix.loc["ros", "a"] == pytest.approx(0.3)
    assert matrix.loc["ros", "b"] == 0.0
    assert "smote" not in matrix.index
    assert "data-method" in violation_heatmap(results).svg


def test_pairwise_plot_flags_violating_samples():
    samples = Dataset(np.array([[1.0, 1.0], [6.0, 2.0], [2.0, 3.0]]), [0, 0, 0], ("a", "b"), ("c",))
    figure = pairwise_violation_plot(samples, [DomainRule(feature="a", upper=5.0)])
    assert figure.table["violating"].tolist() == [False, True, False]
    assert figure.svg.count('data-violating="true"') == 1
    assert "stroke-dasharray" in figure.svg


def test_pairwise_plot_needs_two_features():
    samples = Dataset(np.array([[1.0], [2.0]]), [0, 0], ("a",), ("c",))
    with pytest.raises(DatasetError):
        pairwise_violation_plot(samples, [])


def test_fmt():
    assert fmt(float("nan")) == "n/a"
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333"


def test_constant_values_map_to_low_colour():
    assert color_scale(np.full(3, 7.0)) == ["#f7fbff"] * 3
    assert color_scale(np.array([0.0, 1.0])) == ["#f7fbff", "#08306b"]


def test_figure_save(tmp_path, trace):
    svg_path, csv_path = delta_table(trace).save(tmp_path / "figs" / "trace_0_deltas")
    assert svg_path.suffix == ".svg" and svg_path.read_text().startswith("<?xml")
    assert pd.read_csv(csv_path)["feature"].tolist() == ["age", "income", "debt"]


def test_barplot_uses_accepted_sample(trace):
    accepted = Trace(trace.query, trace.cls, trace.query_index, trace.feature_names, trace.records,
                     accepted=np.array([1.5, 2.0, 3.0]))
    assert not np.array_equal(accepted.final(), accepted.accepted)
    table = cumulative_change_barplot(accepted).table
    assert table["augmented"].tolist() == [1.5, 2.0, 3.0]
    np.testing.assert_allclose(table["abs_change"], [0.5, 0.0, 0.0])
