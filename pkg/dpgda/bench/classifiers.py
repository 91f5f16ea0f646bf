# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Downstream classifiers used to score augmented training sets. Trees work on
raw values; kNN and logistic regression on features scaled to [0, 1] by the
training ranges.
"""

from abc import ABC, abstractmethod

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import expit

from dpgda.config import ClassifierSpec
from dpgda.errors import SurrogateError
from dpgda.surrogate.forest import train_tree
from dpgda.tabular import Dataset, FeatureStats, feature_stats


class BaseClassifier(ABC):
    """The base class for all downstream classifiers."""

    def __init__(self, spec: ClassifierSpec):
        self.spec = spec
        self.n_classes = 0

    @abstractmethod
    def fit(self, train: Dataset, seed: int = 0) -> "BaseClassifier":
        pass

    @abstractmethod
    def predict(self, X: np.ndarray) -> np.ndarray:
        pass

    def _check_train(self, train: Dataset):
        if train.n_samples == 0:
            raise SurrogateError("cannot train a classifier on an empty dataset")
        self.n_classes = train.n_classes


class RangeScaler:
    def __init__(self, stats: FeatureStats):
        self.minimum = stats.minimum
        span = stats.range
        # constant features map to 0
        self.inverse = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.minimum) * self.inverse


class TreeClassifier(BaseClassifier):
    def fit(self, train, seed=0):
        self._check_train(train)
        self.tree = train_tree(train, max_depth=self.spec.max_depth, min_samples_leaf=1, seed=seed)
        return self

    def predict(self, X):
        return self.tree.predict(X)


class KNNClassifier(BaseClassifier):
    """Majority vote of the k nearest training rows; ties go to the lowest class id."""

    def fit(self, train, seed=0):
        self._check_train(train)
        self.scale = RangeScaler(feature_stats(train))
        self.points = self.scale(train.features)
        self.labels = train.labels
        return self

    def predict(self, X):
        k = min(self.spec.k, self.points.shape[0])
        distances = cdist(self.scale(X), self.points)
        # stable sort: equidistant neighbours by lowest training index
        nearest = np.argsort(distances, axis=1, kind="stable")[:, :k]
        votes = np.zeros((nearest.shape[0], self.n_classes), dtype=np.int64)
        np.add.at(votes, (np.repeat(np.arange(nearest.shape[0]), k), self.labels[nearest].ravel()), 1)
        return np.argmax(votes, axis=1).astype(np.int64)


class LogisticRegressionClassifier(BaseClassifier):
    """One-vs-rest logistic regression fitted by full-batch gradient descent with L2."""

    def fit(self, train, seed=0):
        self._check_train(train)
        self.scale = RangeScaler(feature_stats(train))
        X = self.scale(train.features)
        n, d = X.shape
        Y = np.zeros((n, self.n_classes))
        Y[np.arange(n), train.labels] = 1.0
        W = np.zeros((d, self.n_classes))
        b = np.zeros(self.n_classes)
        lr, l2 = self.spec.learning_rate, self.spec.l2
        for _ in range(self.spec.epochs):
            error = expit(X @ W + b) - Y
            W -= lr * (X.T @ error / n + l2 * W)
            b -= lr * error.mean(axis=0)
        self.W, self.b = W, b
        return self

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.scale(X) @ self.W + self.b)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1).astype(np.int64)


_KINDS = {
    "decision_tree": TreeClassifier,
    "knn": KNNClassifier,
    "logistic_regression": LogisticRegressionClassifier,
}

CLASSIFIERS = tuple(_KINDS)


def train_classifier(spec: ClassifierSpec, train: Dataset, seed: int = 0) -> BaseClassifier:
    return _KINDS[spec.kind](spec).fit(train, seed)


def predict_all(model: BaseClassifier, test: Dataset) -> np.ndarray:
    return model.predict(test.features)
