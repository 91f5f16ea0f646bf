# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Validated configuration models for every stage of the pipeline.

All models are frozen pydantic models so a config can be shared between
worker processes and hashed into run metadata. Numeric defaults that the
method leaves open (forest size, GA population, plateau length) are
project choices, see DESIGN.md.
"""

import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dpgda.errors import ConfigError


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SplitSpec(FrozenModel):
    """Stratified train/test split; `holdout_fraction` is applied inside train."""
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    holdout_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)


class ForestConfig(FrozenModel):
    n_trees: int = Field(default=100, ge=1)
    max_depth: int = Field(default=8, ge=1)
    min_samples_leaf: int = Field(default=2, ge=1)
    bootstrap_fraction: float = Field(default=1.0, gt=0.0, le=1.0)
    # None means ceil(sqrt(d)), resolved at training time
    features_per_split: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    jobs: int = Field(default=1, ge=1)

    def resolve_features_per_split(self, n_features: int) -> int:
        if self.features_per_split is None:
            return max(1, math.ceil(math.sqrt(n_features)))
        return min(self.features_per_split, n_features)


class DPGConfig(FrozenModel):
    quantize_decimals: int = Field(default=2, ge=0, le=12)
    min_support: float = Field(default=0.0, ge=0.0, le=1.0)
    enclose: bool = True


class FitnessWeights(FrozenModel):
    """Weights of adherence (w1), distance (w2) and sparsity complement (w3)."""
    w1: float = Field(default=2.0, ge=0.0)
    w2: float = Field(default=1.0, ge=0.0)
    w3: float = Field(default=3.0, ge=0.0)

    @model_validator(mode="after")
    def _not_all_zero(self):
        if self.w1 == 0 and self.w2 == 0 and self.w3 == 0:
            raise ValueError("at least one fitness weight must be positive")
        return self

    @property
    def total(self) -> float:
        return self.w1 + self.w2 + self.w3

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)

    @classmethod
    def parse(cls, text: str) -> "FitnessWeights":
        """Parses the CLI form ``"2,1,3"``."""
        try:
            values = [float(part) for part in text.split(",")]
        except ValueError as exc:
            raise ConfigError(f"weights must be numbers, got '{text}'", "weights") from exc
        if len(values) != 3:
            raise ConfigError(f"expected three weights w1,w2,w3, got '{text}'", "weights")
        return build(cls, {"w1": values[0], "w2": values[1], "w3": values[2]}, "weights")


class GAConfig(FrozenModel):
    population_size: int = Field(default=50, ge=2)
    max_generations: int = Field(default=100, ge=1)
    plateau_patience: int = Field(default=10, ge=1)
    plateau_epsilon: float = Field(default=1e-9, ge=0.0)
    tournament_size: int = Field(default=3, ge=1)
    crossover_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    mutation_rate: float = Field(default=0.2, ge=0.0, le=1.0)
    mutation_sigma_fraction: float = Field(default=0.1, ge=0.0)
    elitism_count: int = Field(default=1, ge=0)
    sparsity_epsilon_fraction: float = Field(default=1e-6, gt=0.0)
    retries_on_infeasible: int = Field(default=3, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    jobs: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _elitism_below_population(self):
        if self.elitism_count >= self.population_size:
            raise ValueError("elitism_count must be smaller than population_size")
        return self


class PipelineConfig(FrozenModel):
    """Everything `augment_dataset` needs besides the data itself."""
    forest: ForestConfig = ForestConfig()
    dpg: DPGConfig = DPGConfig()
    ga: GAConfig = GAConfig()
    weights: FitnessWeights = FitnessWeights()
    holdout_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)


class SamplerSpec(FrozenModel):
    kind: Literal["ros", "smote", "jitter", "dpgda", "none"]
    k_neighbors: int = Field(default=5, ge=1)
    sigma_fraction: float = Field(default=0.3, gt=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)


CLASSIFIER_ALIASES = {"tree": "decision_tree", "dt": "decision_tree", "logreg": "logistic_regression",
                      "lr": "logistic_regression"}


class ClassifierSpec(FrozenModel):
    kind: Literal["decision_tree", "knn", "logistic_regression"]
    max_depth: int = Field(default=8, ge=1)
    k: int = Field(default=5, ge=1)
    learning_rate: float = Field(default=0.1, gt=0.0)
    epochs: int = Field(default=200, ge=1)
    l2: float = Field(default=1e-4, ge=0.0)

    @field_validator("kind", mode="before")
    @classmethod
    def _aliases(cls, value: Any):
        return CLASSIFIER_ALIASES.get(value, value)


class BenchConfig(FrozenModel):
    """The experimental protocol: which cells to run and how."""
    methods: Tuple[Literal["ros", "smote", "jitter", "dpgda", "none"], ...] = ("dpgda", "ros", "smote", "jitter")
    levels: Tuple[float, ...] = (0.15, 0.30, 0.50)
    reps: int = Field(default=10, ge=1)
    classifiers: Tuple[Literal["decision_tree", "knn", "logistic_regression"], ...] = (
        "decision_tree", "knn", "logistic_regression")
    split: SplitSpec = SplitSpec()
    pipeline: PipelineConfig = PipelineConfig()
    k_neighbors: int = Field(default=5, ge=1)
    sigma_fraction: float = Field(default=0.3, gt=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    jobs: int = Field(default=1, ge=1)
    # wall-clock runtime_s; off gives byte-identical result files
    timing: bool = True

    @field_validator("levels", mode="after")
    @classmethod
    def _levels_in_range(cls, value):
        for level in value:
            if not 0.0 < level < 1.0:
                raise ValueError(f"levels must lie in (0, 1), got {level}")
        return value

    @field_validator("classifiers", mode="before")
    @classmethod
    def _classifier_aliases(cls, value: Any):
        if isinstance(value, str):
            value = [part.strip() for part in value.split(",") if part.strip()]
        return tuple(CLASSIFIER_ALIASES.get(v, v) for v in value)


def build(model: type, data: dict, prefix: str = ""):
    """
    Validates `data` against `model`, turning pydantic errors into a
    ConfigError whose key path names the offending entry.
    """
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        if prefix:
            path = f"{prefix}.{path}" if path else prefix
        raise ConfigError(first["msg"], path) from exc


def load_toml(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def merge_dicts(base: dict, override: dict) -> dict:
    """Recursively merges two nested dicts; values in `override` win."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged


if __name__ == "__main__":
    pipeline = PipelineConfig()
    print("--- Default pipeline ---")
    print(pipeline.model_dump_json(indent=2))
