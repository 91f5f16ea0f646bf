# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Benchmark harness.

A cell is one (dataset, method, level, repetition). Every cell splits the
dataset, lets the method augment the training part only, trains each
downstream classifier on the augmented data and scores it on the untouched
test part. Splits depend only on (seed, dataset, repetition), so every
method sees the same partitions; sampler seeds depend on the cell index.
"""

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import psutil

from dpgda.bench.classifiers import predict_all, train_classifier
from dpgda.config import BenchConfig, ClassifierSpec, FitnessWeights, SamplerSpec
from dpgda.constraints import DomainRule, audit, rules_from_json
from dpgda.errors import DatasetError, StatisticsError
from dpgda.logger import log_event
from dpgda.metrics import macro_metrics
from dpgda.samplers import build_sampler
from dpgda.seeding import derive_seed
from dpgda.tabular import Dataset, load_csv, stratified_split

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["dataset", "method", "level", "rep", "classifier", "f1", "precision", "recall",
                  "runtime_s", "violation_rate", "status"]
OK = "ok"
CONTROL_METHOD = "none"


@dataclass(frozen=True, eq=False)
class BenchDataset:
    name: str
    data: Dataset
    rules: Optional[Tuple[DomainRule, ...]] = None
    minority_class: Optional[int] = None

    @property
    def minority(self) -> int:
        return self.data.minority_class() if self.minority_class is None else self.minority_class


@dataclass(frozen=True)
class BenchResult:
    dataset: str
    method: str
    level: float
    rep: int
    classifier: str
    f1: float
    precision: float
    recall: float
    runtime_s: float
    violation_rate: float
    status: str = OK


@dataclass(frozen=True)
class Cell:
    index: int
    dataset: int
    method: str
    level: float
    rep: int


def load_benchmark_datasets(directory, label_column=None) -> List[BenchDataset]:
    """
    Every ``*.csv`` in `directory` (sorted by name); ``<stem>.rules.json``
    next to a CSV is picked up as its domain rules.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"dataset directory not found: {directory}")
    datasets = []
    for path in sorted(directory.glob("*.csv")):
        rules_path = path.with_name(f"{path.stem}.rules.json")
        rules = tuple(rules_from_json(rules_path)) if rules_path.exists() else None
        datasets.append(BenchDataset(path.stem, load_csv(path, label_column), rules))
    if not datasets:
        raise DatasetError(f"no CSV files in {directory}")
    return datasets


def plan_cells(datasets: Sequence[BenchDataset], cfg: BenchConfig) -> List[Cell]:
    """Cells in output order; the control method runs once per repetition at level 0."""
    cells = []
    for d, method in itertools.product(range(len(datasets)), cfg.methods):
        levels = (0.0,) if method == CONTROL_METHOD else cfg.levels
        for level, rep in itertools.product(levels, range(cfg.reps)):
            cells.append(Cell(len(cells), d, method, level, rep))
    return cells


def _check_leakage(augmented: Dataset, train: Dataset, test: Dataset):
    original = augmented.row_ids[augmented.row_ids >= 0]
    if np.intersect1d(original, test.row_ids).size or np.setdiff1d(original, train.row_ids).size:
        raise DatasetError("test rows reached the augmented training data")


def _failed_rows(bench: BenchDataset, cell: Cell, cfg: BenchConfig, status: str) -> List[BenchResult]:
    return [BenchResult(bench.name, cell.method, cell.level, cell.rep, kind, math.nan, math.nan, math.nan,
                        math.nan, math.nan, status) for kind in cfg.classifiers]


def run_cell(bench: BenchDataset, cell: Cell, cfg: BenchConfig) -> List[BenchResult]:
    split_seed = derive_seed(cfg.seed, "split", cell.dataset, cell.rep)
    cell_seed = derive_seed(cfg.seed, "cell", cell.index)
    try:
        train, test = stratified_split(bench.data, cfg.split.model_copy(update={"seed": split_seed}))
        spec = SamplerSpec(kind=cell.method, k_neighbors=cfg.k_neighbors, sigma_fraction=cfg.sigma_fraction,
                           seed=cell_seed)
        sampler = build_sampler(spec, cfg.pipeline)

        started = time.perf_counter()
        result = sampler.augment(train, bench.minority, cell.level, cell_seed)
        runtime = time.perf_counter() - started if cfg.timing else 0.0
        _check_leakage(result.augmented, train, test)

        if bench.rules is None:
            violation_rate = math.nan
        elif result.n_synthetic == 0:
            violation_rate = 0.0
        else:
            synthetic = Dataset(result.synthetic, np.full(result.n_synthetic, bench.minority), train.feature_names,
                                train.class_names)
            violation_rate = audit(synthetic, bench.rules).violation_rate

        rows = []
        for kind in cfg.classifiers:
            model = train_classifier(ClassifierSpec(kind=kind), result.augmented, derive_seed(cell_seed, kind))
            f1, precision, recall = macro_metrics(test.labels, predict_all(model, test), bench.data.n_classes)
            rows.append(BenchResult(bench.name, cell.method, cell.level, cell.rep, kind, f1, precision, recall,
                                    runtime, violation_rate))
        return rows
    except Exception as exc:
        logger.warning("cell %d (%s/%s/%.2f/%d) failed: %s", cell.index, bench.name, cell.method, cell.level,
                       cell.rep, exc)
        return _failed_rows(bench, cell, cfg, f"failed:{type(exc).__name__}")


_WORKER: Dict[str, object] = {}


def _init_worker(datasets, cfg):
    _WORKER.update(datasets=datasets, cfg=cfg)


def _run_indexed(cell: Cell) -> List[BenchResult]:
    return run_cell(_WORKER["datasets"][cell.dataset], cell, _WORKER["cfg"])


def run_benchmark(datasets: Sequence[BenchDataset], cfg: BenchConfig = BenchConfig()) -> pd.DataFrame:
    """
    Runs every cell of the protocol.

    Args:
        datasets: Benchmark datasets with optional domain rules.
        cfg (BenchConfig): Methods, levels, repetitions, classifiers, seed, jobs.

    Returns:
        pd.DataFrame: One row per (cell, classifier) in cell order with the
        columns of `RESULT_COLUMNS`. Failed cells keep their rows with NaN
        scores and a ``failed:<error>`` status.
        With `cfg.timing` on (the default) runtime_s is wall-clock time and
        the only column that differs between two runs of the same config.
    """
    datasets = list(datasets)
    cells = plan_cells(datasets, cfg)
    log_event(logger, "bench_start", datasets=len(datasets), cells=len(cells), jobs=cfg.jobs)
    rows: List[BenchResult] = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs, initializer=_init_worker, initargs=(datasets, cfg)) as pool:
            for done, cell_rows in enumerate(pool.map(_run_indexed, cells), start=1):
                rows.extend(cell_rows)
                _progress(done, len(cells))
    else:
        for done, cell in enumerate(cells, start=1):
            rows.extend(run_cell(datasets[cell.dataset], cell, cfg))
            _progress(done, len(cells))
    frame = pd.DataFrame([asdict(row) for row in rows], columns=RESULT_COLUMNS)
    n_failed = int((frame["status"] != OK).sum())
    log_event(logger, "bench_done", rows=len(frame), failed_rows=n_failed)
    return frame


def _progress(done: int, total: int):
    if done == total or done % max(1, total // 20) == 0:
        log_event(logger, "bench_progress", done=done, total=total,
                  rss_mb=psutil.Process().memory_info().rss / 2 ** 20)


def write_results(results: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    results.to_csv(path, index=False, columns=RESULT_COLUMNS, lineterminator="\n", na_rep="")
    return path


def read_results(path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"results file not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in RESULT_COLUMNS if c not in frame.columns and c != "status"]
    if missing:
        raise DatasetError(f"results file lacks column(s): {', '.join(missing)}")
    if "status" not in frame.columns:
        frame["status"] = OK
    return frame


def aggregate_scores(results: pd.DataFrame, metric: str = "f1") -> pd.DataFrame:
    """
    Dataset x method table of `metric`: mean over classifiers and
    repetitions for every level, then mean over levels.
    """
    ok = results[results["status"] == OK]
    per_level = ok.groupby(["dataset", "method", "level"], sort=True)[metric].mean()
    table = per_level.groupby(level=["dataset", "method"]).mean().unstack("method")
    # methods or datasets whose every cell failed stay in the table as NaN
    table = table.reindex(index=sorted(results["dataset"].unique()), columns=sorted(results["method"].unique()))
    table.columns.name = None
    table.index.name = "dataset"
    return table


def runtime_summary(results: pd.DataFrame) -> pd.DataFrame:
    """Mean augmentation seconds per (dataset, method); one timing per cell."""
    ok = results[results["status"] == OK]
    cells = ok.drop_duplicates(["dataset", "method", "level", "rep"])
    table = cells.groupby(["dataset", "method"], sort=True)["runtime_s"].mean().unstack("method")
    table.columns.name = None
    return table


ABLATION_VALUES = (1.0, 2.0, 3.0)


def ablation_grid(datasets: Sequence[BenchDataset], cfg: BenchConfig = BenchConfig(),
                  values: Iterable[float] = ABLATION_VALUES) -> pd.DataFrame:
    """
    One DPG-da benchmark per weight triple from `values`^3, ranked by mean
    macro F1 (best first; equal scores keep the triple order).
    """
    values = tuple(values)
    records = []
    for w1, w2, w3 in itertools.product(values, repeat=3):
        weights = FitnessWeights(w1=w1, w2=w2, w3=w3)
        pipeline = cfg.pipeline.model_copy(update={"weights": weights})
        run_cfg = cfg.model_copy(update={"methods": ("dpgda",), "pipeline": pipeline})
        results = run_benchmark(datasets, run_cfg)
        scores = aggregate_scores(results)
        mean_f1 = float(scores["dpgda"].mean()) if "dpgda" in scores else math.nan
        records.append({"w1": w1, "w2": w2, "w3": w3, "mean_f1": mean_f1,
                        "failed_rows": int((results["status"] != OK).sum())})
    table = pd.DataFrame(records)
    table = table.sort_values("mean_f1", ascending=False, kind="stable", na_position="last").reset_index(drop=True)
    table.insert(0, "rank", np.arange(1, len(table) + 1))
    return table


def scores_for_ranking(results: pd.DataFrame, metric: str = "f1") -> pd.DataFrame:
    table = aggregate_scores(results, metric)
    if table.isna().any().any():
        raise StatisticsError("results hold failed or missing cells; cannot rank methods")
    return table
