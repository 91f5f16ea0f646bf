# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from typing import Tuple

import numpy as np

from dpgda.errors import DatasetError


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise DatasetError(f"label vectors differ in length: {y_true.size} vs {y_pred.size}")
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (y_true, y_pred), 1)
    return matrix


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    # 0/0 is defined as 0
    out = np.zeros_like(numerator, dtype=np.float64)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def per_class_scores(y_true, y_pred, n_classes: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-class precision, recall and F1."""
    cm = confusion_matrix(y_true, y_pred, n_classes)
    tp = np.diag(cm).astype(np.float64)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    precision = _safe_ratio(tp, tp + fp)
    recall = _safe_ratio(tp, tp + fn)
    f1 = _safe_ratio(2 * tp, 2 * tp + fp + fn)
    return precision, recall, f1


def macro_metrics(y_true, y_pred, n_classes: int) -> Tuple[float, float, float]:
    """
    Macro F1, precision and recall: unweighted means over all `n_classes`,
    including classes absent from both vectors (which contribute 0).
    """
    precision, recall, f1 = per_class_scores(y_true, y_pred, n_classes)
    return float(f1.mean()), float(precision.mean()), float(recall.mean())
