# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Interpretability and violation figures.

Every renderer returns a `Figure`: the SVG document plus the table of the
numbers it plots. Numeric values are embedded in the SVG as ``data-*``
attributes so a figure can be read back and checked against its inputs.
"""

import itertools
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from dpgda.constraints import DomainRule, audit
from dpgda.errors import DatasetError
from dpgda.evolution.trace import Trace
from dpgda.report.svg import SvgCanvas, color_scale, fmt
from dpgda.tabular import Dataset

logger = logging.getLogger(__name__)

VIOLATION_MARK = "×"
_SVG_NS = "{http://www.w3.org/2000/svg}"


@dataclass(frozen=True, eq=False)
class Figure:
    svg: str
    table: pd.DataFrame

    def save(self, path) -> Tuple[Path, Path]:
        """Writes ``<path>.svg`` and the companion ``<path>.csv``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        svg_path, csv_path = path.with_suffix(".svg"), path.with_suffix(".csv")
        svg_path.write_text(self.svg, encoding="utf-8")
        self.table.to_csv(csv_path, index=False, lineterminator="\n")
        return svg_path, csv_path


def _require_records(trace: Trace):
    if not trace.records:
        raise DatasetError("trace has no generations")


def transition_labels(trace: Trace) -> List[str]:
    return ["q->0"] + [f"{g - 1}->{g}" for g in range(1, len(trace.records))]


def delta_frame(trace: Trace) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Numeric deltas and violation flags, both features x transitions. A cell is
    flagged when that generation's best breaks a bound on that feature.
    """
    _require_records(trace)
    names, labels = trace.names(), transition_labels(trace)
    values = pd.DataFrame(trace.deltas().T, index=names, columns=labels)
    flags = pd.DataFrame(False, index=names, columns=labels)
    for label, record in zip(labels, trace.records):
        for feature, _side in record.violations:
            flags.iloc[feature, labels.index(label)] = True
    return values, flags


def delta_table(trace: Trace) -> Figure:
    """Per-feature change between successive generations, violating cells marked ``×``."""
    values, flags = delta_frame(trace)
    cells = values.map(fmt).where(~flags, values.map(fmt) + f" ({VIOLATION_MARK})")
    table = cells.reset_index(names="feature")

    cell_w, cell_h, left = 90.0, 22.0, 130.0
    canvas = SvgCanvas(left + cell_w * values.shape[1] + 10, cell_h * (values.shape[0] + 2),
                       "feature changes between generations")
    for j, label in enumerate(values.columns):
        canvas.text(left + cell_w * (j + 0.5), cell_h, label, anchor="middle", extra={"font-weight": "bold"})
    for i, name in enumerate(values.index):
        y = cell_h * (i + 2)
        canvas.text(8, y - 6, name)
        for j, label in enumerate(values.columns):
            flagged = bool(flags.iloc[i, j])
            canvas.filled_rectangle(left + cell_w * j, y - cell_h + 4, left + cell_w * (j + 1), y + 2,
                                    "#fde0dd" if flagged else "#ffffff",
                                    {"class": "cell", "stroke": "#cccccc", "data-feature": name,
                                     "data-transition": label, "data-value": repr(float(values.iloc[i, j])),
                                     "data-violation": str(flagged).lower()})
            canvas.text(left + cell_w * (j + 0.5), y - 6, cells.iloc[i, j], anchor="middle")
    return Figure(canvas.get_svg(), table)


def evolution_heatmap(trace: Trace) -> Figure:
    """Features x generations grid coloured by |delta|, min-max scaled over the whole figure."""
    _require_records(trace)
    names = trace.names()
    deltas = trace.deltas()
    n_gen = deltas.shape[0]
    colors = np.asarray(color_scale(np.abs(deltas.T))).reshape(len(names), n_gen)

    cell, left, top = 24.0, 130.0, 30.0
    canvas = SvgCanvas(left + cell * n_gen + 10, top + cell * len(names) + 30, "evolution heatmap")
    canvas.group_start({"id": "heatmap", "data-rows": len(names), "data-cols": n_gen})
    for i, name in enumerate(names):
        canvas.text(8, top + cell * (i + 0.7), name)
        for g in range(n_gen):
            canvas.filled_rectangle(left + cell * g, top + cell * i, left + cell * (g + 1), top + cell * (i + 1),
                                    colors[i, g], {"class": "cell", "data-row": i, "data-col": g,
                                                   "data-value": repr(float(deltas[g, i]))})
    canvas.group_end()
    for g in range(0, n_gen, max(1, n_gen // 10)):
        canvas.text(left + cell * (g + 0.5), top - 8, g, anchor="middle")
    canvas.text(left, top + cell * len(names) + 20, "generation")

    table = pd.DataFrame(deltas, columns=[f"delta_{name}" for name in names])
    table.insert(0, "generation", np.arange(n_gen))
    return Figure(canvas.get_svg(), table)


def read_heatmap_values(svg: str) -> np.ndarray:
    """Rebuilds the features x generations matrix from the ``data-value`` attributes."""
    root = ET.fromstring(svg)
    grid = root.find(f".//{_SVG_NS}g[@id='heatmap']")
    if grid is None:
        raise DatasetError("no heatmap grid in SVG document")
    values = np.full((int(grid.get("data-rows")), int(grid.get("data-cols"))), np.nan)
    for rect in grid.iter(f"{_SVG_NS}rect"):
        values[int(rect.get("data-row")), int(rect.get("data-col"))] = float(rect.get("data-value"))
    return values


def cumulative_change_barplot(trace: Trace) -> Figure:
    """
    Horizontal bars of |augmented - query| per feature, annotated with the
    change, the number of generations that moved the feature and the
    ``query -> augmented`` values.
    """
    _require_records(trace)
    names = trace.names()
    query, final = trace.query, trace.augmented()
    change = np.abs(final - query)
    moved = (trace.deltas() != 0).sum(axis=0)
    table = pd.DataFrame({"feature": names, "query": query, "augmented": final, "abs_change": change,
                          "changed_generations": moved})

    bar_h, left, plot_w = 26.0, 130.0, 300.0
    canvas = SvgCanvas(left + plot_w + 260, bar_h * (len(names) + 1) + 10, "cumulative change per feature")
    scale = plot_w / change.max() if change.max() > 0 else 0.0
    for i, name in enumerate(names):
        y = bar_h * (i + 1)
        canvas.text(8, y, name)
        canvas.filled_rectangle(left, y - bar_h * 0.6, left + change[i] * scale, y + bar_h * 0.1, "#4292c6",
                                {"class": "bar", "data-feature": name, "data-value": repr(float(change[i])),
                                 "data-changed-generations": int(moved[i])})
        canvas.text(left + change[i] * scale + 6, y,
                    f"{fmt(change[i])} ({int(moved[i])} gen)  {fmt(query[i])} -> {fmt(final[i])}")
    return Figure(canvas.get_svg(), table)


def violation_matrix(results: pd.DataFrame) -> pd.DataFrame:
    """Methods x datasets mean violation rate, one value per benchmark cell."""
    if "violation_rate" not in results.columns:
        raise DatasetError("results lack the violation_rate column", column="violation_rate")
    ok = results[results["status"] == "ok"] if "status" in results.columns else results
    cells = ok.drop_duplicates(["dataset", "method", "level", "rep"])
    matrix = cells.groupby(["method", "dataset"], sort=True)["violation_rate"].mean().unstack("dataset")
    matrix.columns.name = None
    return matrix


def violation_heatmap(results: pd.DataFrame) -> Figure:
    matrix = violation_matrix(results)
    colors = np.asarray(color_scale(matrix.to_numpy(), low="#fff5f0", high="#a50f15")).reshape(matrix.shape)

    cell_w, cell_h, left, top = 90.0, 28.0, 100.0, 40.0
    canvas = SvgCanvas(left + cell_w * matrix.shape[1] + 10, top + cell_h * matrix.shape[0] + 10,
                       "violation rate per method and dataset")
    for j, dataset in enumerate(matrix.columns):
        canvas.text(left + cell_w * (j + 0.5), top - 10, dataset, anchor="middle")
    for i, method in enumerate(matrix.index):
        y = top + cell_h * i
        canvas.text(8, y + cell_h * 0.65, method)
        for j, dataset in enumerate(matrix.columns):
            value = float(matrix.iloc[i, j])
            canvas.filled_rectangle(left + cell_w * j, y, left + cell_w * (j + 1), y + cell_h, colors[i, j],
                                    {"class": "cell", "data-method": method, "data-dataset": dataset,
                                     "data-value": repr(value)})
            canvas.text(left + cell_w * (j + 0.5), y + cell_h * 0.65, fmt(value), anchor="middle")
    return Figure(canvas.get_svg(), matrix.reset_index())


def pairwise_violation_plot(samples: Dataset, rules: Sequence[DomainRule], panel: float = 180.0) -> Figure:
    """
    One scatter panel per feature pair; samples breaking any rule are drawn in
    red and finite rule bounds as dashed lines.
    """
    if samples.n_features < 2:
        raise DatasetError("pairwise plots need at least two features")
    report = audit(samples, rules)
    violating = np.zeros(samples.n_samples, dtype=bool)
    for index, _broken in report.violations:
        violating[index] = True

    names = samples.feature_names
    pairs = list(itertools.combinations(range(samples.n_features), 2))
    per_row = min(3, len(pairs))
    n_rows = -(-len(pairs) // per_row)
    pad = 40.0
    canvas = SvgCanvas(per_row * (panel + pad) + pad, n_rows * (panel + pad) + pad, "pairwise violations")
    lo, hi = samples.features.min(axis=0), samples.features.max(axis=0)
    for rule in rules:
        f = names.index(rule.feature)
        for bound in (rule.lower, rule.upper):
            if bound is not None:
                lo[f], hi[f] = min(lo[f], bound), max(hi[f], bound)
    span = np.where(hi > lo, hi - lo, 1.0)

    records = []
    for p, (a, b) in enumerate(pairs):
        ox = pad + (p % per_row) * (panel + pad)
        oy = pad + (p // per_row) * (panel + pad)
        def px(v, ox=ox, a=a):
            return ox + (v - lo[a]) / span[a] * panel

        def py(v, oy=oy, b=b):
            return oy + panel - (v - lo[b]) / span[b] * panel

        canvas.group_start({"class": "panel", "data-x": names[a], "data-y": names[b]})
        canvas.filled_rectangle(ox, oy, ox + panel, oy + panel, "none", {"stroke": "#999999"})
        for rule in rules:
            for bound in (rule.lower, rule.upper):
                if bound is None:
                    continue
                if rule.feature == names[a]:
                    canvas.line(px(bound), oy, px(bound), oy + panel, "#d94801", {"stroke-dasharray": "4,3"})
                elif rule.feature == names[b]:
                    canvas.line(ox, py(bound), ox + panel, py(bound), "#d94801", {"stroke-dasharray": "4,3"})
        for i, row in enumerate(samples.features):
            canvas.circle(px(row[a]), py(row[b]), 2.0, "#cb181d" if violating[i] else "#2171b5",
                          {"data-sample": i, "data-violating": str(bool(violating[i])).lower()})
            records.append({"sample": i, "feature_x": names[a], "feature_y": names[b], "x": row[a], "y": row[b],
                            "violating": bool(violating[i])})
        canvas.text(ox + panel / 2, oy + panel + 16, names[a], anchor="middle")
        canvas.text(ox - 6, oy + panel / 2, names[b], anchor="end")
        canvas.group_end()
    logger.debug("pairwise plot: %d panels, %d violating samples", len(pairs), int(violating.sum()))
    return Figure(canvas.get_svg(), pd.DataFrame(records, columns=["sample", "feature_x", "feature_y", "x", "y",
                                                                    "violating"]))
