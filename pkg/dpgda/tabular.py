# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Tabular data model shared by every module: an immutable numeric feature
matrix with integer class labels, plus CSV ingestion and stratified splits.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from dpgda.config import SplitSpec
from dpgda.errors import DatasetError

logger = logging.getLogger(__name__)

LABEL_HEADER = "class"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Columnar numeric feature matrix with class labels.

    `row_ids` records where every row came from (its index in the source
    file); synthetic rows carry -1. The benchmark harness relies on it to
    prove that test rows never reach a sampler or the surrogate.
    """
    features: np.ndarray
    labels: np.ndarray
    feature_names: Tuple[str, ...]
    class_names: Tuple[str, ...]
    row_ids: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, len(self.feature_names)) if len(self.feature_names) else features.reshape(0, 0)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        feature_names = tuple(str(name) for name in self.feature_names)
        class_names = tuple(str(name) for name in self.class_names)

        if features.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        if features.shape[0] != labels.shape[0]:
            raise DatasetError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if features.shape[1] != len(feature_names):
            raise DatasetError(f"{features.shape[1]} feature columns but {len(feature_names)} feature names")
        if len(set(feature_names)) != len(feature_names):
            raise DatasetError("duplicate feature names")
        if labels.size and (labels.min() < 0 or labels.max() >= len(class_names)):
            raise DatasetError(f"labels must lie in [0, {len(class_names)})")
        if not np.all(np.isfinite(features)):
            raise DatasetError("features contain NaN or infinite values")

        row_ids = self.row_ids
        if row_ids is None:
            row_ids = np.arange(features.shape[0], dtype=np.int64)
        row_ids = np.asarray(row_ids, dtype=np.int64).reshape(-1)
        if row_ids.shape[0] != features.shape[0]:
            raise DatasetError("row_ids length must match the number of rows")

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "feature_names", feature_names)
        object.__setattr__(self, "class_names", class_names)
        object.__setattr__(self, "row_ids", _frozen(row_ids))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def __len__(self) -> int:
        return self.n_samples

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def present_classes(self) -> np.ndarray:
        return np.flatnonzero(self.class_counts() > 0)

    def minority_class(self) -> int:
        """Least frequent present class; ties go to the lowest class id."""
        counts = self.class_counts()
        present = self.present_classes()
        if present.size == 0:
            raise DatasetError("empty dataset has no minority class")
        return int(present[np.argmin(counts[present])])

    def class_index(self, name: Union[str, int]) -> int:
        """Resolves a class name (or a numeric id given as text) to its id."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= int(name) < self.n_classes:
                raise DatasetError(f"unknown class id {name}")
            return int(name)
        if name in self.class_names:
            return self.class_names.index(name)
        raise DatasetError(f"unknown class '{name}', known: {', '.join(self.class_names)}")

    def rows_of(self, cls: int) -> np.ndarray:
        return self.features[self.labels == cls]

    def take(self, indices: Sequence[int]) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices], self.feature_names,
                       self.class_names, self.row_ids[indices])

    def with_rows(self, features: np.ndarray, cls: int) -> "Dataset":
        """Appends synthetic rows of class `cls` (row id -1)."""
        features = np.asarray(features, dtype=np.float64).reshape(-1, self.n_features)
        labels = np.full(features.shape[0], cls, dtype=np.int64)
        extra = Dataset(features, labels, self.feature_names, self.class_names,
                        np.full(features.shape[0], -1, dtype=np.int64))
        return self.concat(extra)

    def concat(self, other: "Dataset") -> "Dataset":
        if other.feature_names != self.feature_names or other.class_names != self.class_names:
            raise DatasetError("cannot concatenate datasets with different schemas")
        return Dataset(np.vstack([self.features, other.features]),
                       np.concatenate([self.labels, other.labels]),
                       self.feature_names, self.class_names,
                       np.concatenate([self.row_ids, other.row_ids]))

    def to_frame(self, label_column: str = LABEL_HEADER) -> pd.DataFrame:
        frame = pd.DataFrame(self.features, columns=list(self.feature_names))
        frame[label_column] = [self.class_names[label] for label in self.labels]
        return frame


@dataclass(frozen=True, eq=False)
class FeatureStats:
    """Per-feature min, max and range over a reference dataset."""
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "minimum", _frozen(np.asarray(self.minimum, dtype=np.float64)))
        object.__setattr__(self, "maximum", _frozen(np.asarray(self.maximum, dtype=np.float64)))

    @property
    def range(self) -> np.ndarray:
        return self.maximum - self.minimum

    def merge(self, other: "FeatureStats") -> "FeatureStats":
        return FeatureStats(np.minimum(self.minimum, other.minimum), np.maximum(self.maximum, other.maximum))

    def to_dict(self) -> dict:
        return {"min": self.minimum.tolist(), "max": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureStats":
        return cls(np.asarray(data["min"], dtype=np.float64), np.asarray(data["max"], dtype=np.float64))


def load_csv(path, label_column: Union[str, int, None] = None) -> Dataset:
    """
    Reads a UTF-8, comma separated file with a header row.

    Args:
        path: CSV file.
        label_column: Column name or position of the class label; the last
            column when omitted. Negative positions count from the end.

    Returns:
        Dataset: Labels re-encoded to 0..k-1 in first-appearance order.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise DatasetError(f"empty file: {path}") from exc
    except pd.errors.ParserError as exc:
        raise DatasetError(f"cannot parse {path}: {exc}") from exc

    columns = list(frame.columns)
    if label_column is None:
        label_column = -1
    if isinstance(label_column, str) and label_column.lstrip("-").isdigit() and label_column not in columns:
        label_column = int(label_column)
    if isinstance(label_column, int):
        if not -len(columns) <= label_column < len(columns):
            raise DatasetError(f"label column index {label_column} out of range for {len(columns)} columns")
        label_name = columns[label_column]
    else:
        if label_column not in columns:
            raise DatasetError(f"label column '{label_column}' not found in header")
        label_name = label_column

    if frame.shape[0] == 0:
        raise DatasetError(f"no data rows in {path}")

    feature_names = [name for name in columns if name != label_name]
    matrix = np.empty((frame.shape[0], len(feature_names)), dtype=np.float64)
    for j, name in enumerate(feature_names):
        raw = frame[name].str.strip()
        values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            first = int(bad[0])
            # +2: header line plus 1-based numbering
            raise DatasetError(f"cannot parse '{raw.iloc[first]}' as a finite number", row=first + 2, column=name)
        matrix[:, j] = values

    raw_labels = frame[label_name].str.strip()
    class_names = list(pd.unique(raw_labels))
    lookup = {name: index for index, name in enumerate(class_names)}
    labels = raw_labels.map(lookup).to_numpy(dtype=np.int64)

    ds = Dataset(matrix, labels, tuple(feature_names), tuple(class_names))
    logger.debug("loaded %s: n=%d d=%d classes=%d", path, ds.n_samples, ds.n_features, ds.n_classes)
    return ds


def write_csv(ds: Dataset, path, label_column: str = LABEL_HEADER) -> Path:
    """Writes `ds` in the format `load_csv` reads; floats use round-trip repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = ds.to_frame(label_column)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def _per_class_train_counts(counts: np.ndarray, fraction: float) -> np.ndarray:
    # Minority allocation rounds up, other classes round half up; every class
    # keeps at least one row on each side of the split.
    present = np.flatnonzero(counts > 0)
    minority = present[np.argmin(counts[present])]
    train_counts = np.zeros_like(counts)
    for cls in present:
        share = fraction * counts[cls]
        share = round(share, 9)
        n_train = math.ceil(share) if cls == minority else math.floor(share + 0.5)
        train_counts[cls] = min(max(n_train, 1), counts[cls] - 1)
    return train_counts


def _stratified_indices(ds: Dataset, fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    counts = ds.class_counts()
    for cls in ds.present_classes():
        if counts[cls] < 2:
            raise DatasetError(f"class '{ds.class_names[cls]}' has a single sample; cannot stratify")
    rng = np.random.default_rng(seed)
    train_counts = _per_class_train_counts(counts, fraction)
    train_parts, test_parts = [], []
    for cls in ds.present_classes():
        members = np.flatnonzero(ds.labels == cls)
        members = members[rng.permutation(members.size)]
        train_parts.append(members[:train_counts[cls]])
        test_parts.append(members[train_counts[cls]:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def stratified_split(ds: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Disjoint, exhaustive, per-class stratified train/test partition."""
    train_idx, test_idx = _stratified_indices(ds, spec.train_fraction, spec.seed)
    return ds.take(train_idx), ds.take(test_idx)


def holdout_split(ds: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Same as `stratified_split` but with `holdout_fraction` (surrogate holdout)."""
    train_idx, rest_idx = _stratified_indices(ds, spec.holdout_fraction, spec.seed)
    return ds.take(train_idx), ds.take(rest_idx)


def feature_stats(ds: Union[Dataset, np.ndarray]) -> FeatureStats:
    features = ds.features if isinstance(ds, Dataset) else np.asarray(ds, dtype=np.float64)
    if features.shape[0] == 0:
        raise DatasetError("cannot compute feature statistics of an empty dataset")
    return FeatureStats(features.min(axis=0), features.max(axis=0))


def imbalance_ratio(ds: Dataset) -> float:
    """Majority count divided by minority count over the present classes."""
    counts = ds.class_counts()
    counts = counts[counts > 0]
    if counts.size < 2:
        raise DatasetError("imbalance ratio needs at least two classes")
    return float(counts.max() / counts.min())


def concat_stats(parts: Iterable[FeatureStats]) -> FeatureStats:
    parts = list(parts)
    merged = parts[0]
    for part in parts[1:]:
        merged = merged.merge(part)
    return merged
