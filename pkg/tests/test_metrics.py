# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import numpy as np
import pytest

from dpgda.errors import DatasetError
from dpgda.metrics import confusion_matrix, macro_metrics, per_class_scores


def test_constant_predictor_on_balanced_classes():
    f1, precision, recall = macro_metrics([0, 0, 1, 1], [0, 0, 0, 0], 2)
    assert f1 == pytest.approx(1 / 3)
    assert precision == pytest.approx(0.25)
    assert recall == pytest.approx(0.5)


def test_perfect_prediction():
    assert macro_metrics([0, 1, 2, 1], [0, 1, 2, 1], 3) == (1.0, 1.0, 1.0)


def test_absent_class_contributes_zero():
    f1, _, _ = macro_metrics([0, 1], [0, 1], 3)
    assert f1 == pytest.approx(2 / 3)


def test_confusion_matrix_rows_are_truth():
    cm = confusion_matrix([0, 0, 1], [1, 0, 1], 2)
    np.testing.assert_array_equal(cm, [[1, 1], [0, 1]])


def test_per_class_scores():
    precision, recall, f1 = per_class_scores([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], 2)
    np.testing.assert_allclose(precision, [0.5, 2 / 3])
    np.testing.assert_allclose(recall, [0.5, 2 / 3])
    np.testing.assert_allclose(f1, [0.5, 2 / 3])


def test_length_mismatch():
    with pytest.raises(DatasetError):
        macro_metrics([0, 1], [0], 2)
