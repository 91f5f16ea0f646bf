# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Synthetic tabular domains with explicit validity rules.

A domain is described by a TOML file: one generator per feature, a label
rule (a noisy threshold conjunction that marks the minority class) and the
domain rules every real record satisfies. Generation draws candidate rows,
drops those breaking a rule and fills the class quotas in draw order, so
the result holds exactly the configured class counts.
"""

import hashlib
import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from dpgda.config import FrozenModel, build, load_toml
from dpgda.constraints import DomainRule, write_rules_json
from dpgda.errors import ConfigError, DatasetError
from dpgda.predicate import GT, canonical_op
from dpgda.seeding import make_rng
from dpgda.tabular import Dataset, write_csv

logger = logging.getLogger(__name__)

DOMAINS_DIR = Path(__file__).parent / "domains"
BUILTIN_DOMAINS = ("healthcare", "finance", "quality_control", "fraud_detection", "energy", "education")
_RATIO = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*:\s*(\d+(?:\.\d+)?)\s*$")


def parse_ratio(text: str) -> Tuple[float, float]:
    """``"3:1"`` -> (3.0, 1.0), majority first."""
    match = _RATIO.match(str(text))
    if not match:
        raise ConfigError(f"ratio must look like '3:1', got '{text}'", "ratio")
    majority, minority = float(match.group(1)), float(match.group(2))
    if majority <= 0 or minority <= 0:
        raise ConfigError(f"ratio parts must be positive, got '{text}'", "ratio")
    return majority, minority


def class_counts_for(n_samples: int, ratio: str) -> Tuple[int, int]:
    """(majority, minority) counts that honour `ratio` exactly up to rounding."""
    majority, minority = parse_ratio(ratio)
    n_minority = int(round(n_samples * minority / (majority + minority)))
    n_minority = min(max(n_minority, 1), n_samples - 1)
    return n_samples - n_minority, n_minority


class FeatureSpec(FrozenModel):
    name: str = Field(min_length=1)
    distribution: Literal["uniform", "normal", "lognormal", "integer", "poisson"]
    low: Optional[float] = None
    high: Optional[float] = None
    mean: Optional[float] = None
    std: Optional[float] = Field(default=None, gt=0.0)
    lam: Optional[float] = Field(default=None, gt=0.0)
    decimals: Optional[int] = Field(default=None, ge=0, le=12)

    @model_validator(mode="after")
    def _parameters_present(self):
        needed = {"uniform": ("low", "high"), "integer": ("low", "high"), "normal": ("mean", "std"),
                  "lognormal": ("mean", "std"), "poisson": ("lam",)}[self.distribution]
        missing = [p for p in needed if getattr(self, p) is None]
        if missing:
            raise ValueError(f"{self.distribution} feature '{self.name}' needs {', '.join(missing)}")
        if self.low is not None and self.high is not None and self.low > self.high:
            raise ValueError(f"feature '{self.name}': low exceeds high")
        return self

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.distribution == "uniform":
            values = rng.uniform(self.low, self.high, n)
        elif self.distribution == "integer":
            values = rng.integers(int(self.low), int(self.high), n, endpoint=True).astype(np.float64)
        elif self.distribution == "normal":
            values = rng.normal(self.mean, self.std, n)
        elif self.distribution == "lognormal":
            values = rng.lognormal(self.mean, self.std, n)
        else:
            values = rng.poisson(self.lam, n).astype(np.float64)
        if self.decimals is not None:
            values = np.round(values, self.decimals)
        return values


class LabelCondition(FrozenModel):
    """``feature op threshold`` tested on the value plus N(0, noise^2) noise."""
    feature: str
    op: str = GT
    threshold: float
    noise: float = Field(default=0.0, ge=0.0)

    @field_validator("op", mode="before")
    @classmethod
    def _canonical(cls, value):
        return canonical_op(value)


class DomainConfig(FrozenModel):
    name: str = Field(min_length=1)
    n_samples: int = Field(default=1000, ge=12)
    ratio: str = "1:1"
    class_names: Tuple[str, str] = ("negative", "positive")
    features: List[FeatureSpec]
    label_rule: List[LabelCondition]
    rules: List[DomainRule] = []
    max_rounds: int = Field(default=200, ge=1)

    @field_validator("ratio", mode="after")
    @classmethod
    def _ratio_format(cls, value):
        parse_ratio(value)
        return value

    @model_validator(mode="after")
    def _names_resolve(self):
        names = [feature.name for feature in self.features]
        if len(set(names)) != len(names):
            raise ValueError("duplicate feature names")
        for item in list(self.label_rule) + list(self.rules):
            if item.feature not in names:
                raise ValueError(f"unknown feature '{item.feature}'")
        if not self.label_rule:
            raise ValueError("label_rule needs at least one condition")
        return self

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return tuple(feature.name for feature in self.features)

    def counts(self) -> Tuple[int, int]:
        return class_counts_for(self.n_samples, self.ratio)

    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()

    def with_ratio(self, ratio: str) -> "DomainConfig":
        """The same domain with another majority:minority ratio, validated."""
        return build(DomainConfig, {**self.model_dump(), "ratio": ratio}, "domain")


def load_domain_config(name_or_path, ratio: Optional[str] = None) -> DomainConfig:
    """
    A built-in domain by name (``finance``) or a TOML file path. `ratio`
    replaces the configured class ratio, e.g. ``"4:1"`` to make a balanced
    domain imbalanced.
    """
    key = str(name_or_path).lower().replace("-", "_").replace(" ", "_")
    path = DOMAINS_DIR / f"{key}.toml" if key in BUILTIN_DOMAINS else Path(name_or_path)
    cfg = build(DomainConfig, load_toml(path), "domain")
    return cfg if ratio is None else cfg.with_ratio(ratio)


def _rule_mask(X: np.ndarray, cfg: DomainConfig) -> np.ndarray:
    names = list(cfg.feature_names)
    ok = np.ones(X.shape[0], dtype=bool)
    for rule in cfg.rules:
        column = X[:, names.index(rule.feature)]
        ok &= (column >= rule.low) & (column <= rule.high)
    return ok


def _label(X: np.ndarray, cfg: DomainConfig, rng: np.random.Generator) -> np.ndarray:
    names = list(cfg.feature_names)
    positive = np.ones(X.shape[0], dtype=bool)
    for condition in cfg.label_rule:
        values = X[:, names.index(condition.feature)] + rng.normal(0.0, 1.0, X.shape[0]) * condition.noise
        positive &= values > condition.threshold if condition.op == GT else values <= condition.threshold
    return positive.astype(np.int64)


def generate_domain(cfg: DomainConfig, seed: int = 0) -> Tuple[Dataset, List[DomainRule]]:
    """
    Draws `cfg.n_samples` rows with exactly the configured class counts.
    Class 0 is the majority, class 1 the minority (rule-positive) class.

    Raises:
        DatasetError: The quotas are not filled within `cfg.max_rounds` batches,
            i.e. the label or rule region is too small.
    """
    rng = make_rng(seed, "domain", cfg.name)
    quota = np.array(cfg.counts())
    needed = quota.copy()
    batch = 2 * cfg.n_samples
    rows, labels = [], []
    for _ in range(cfg.max_rounds):
        X = np.column_stack([feature.draw(rng, batch) for feature in cfg.features])
        y = _label(X, cfg, rng)
        keep = _rule_mask(X, cfg)
        chosen = []
        for cls in (0, 1):
            members = np.flatnonzero(keep & (y == cls))[:needed[cls]]
            needed[cls] -= members.size
            chosen.append(members)
        chosen = np.sort(np.concatenate(chosen))
        rows.append(X[chosen])
        labels.append(y[chosen])
        if not needed.any():
            break
    else:
        raise DatasetError(f"domain '{cfg.name}': could not fill the class quotas {tuple(quota)} in "
                           f"{cfg.max_rounds} rounds; the label or rule region is too small")
    ds = Dataset(np.vstack(rows), np.concatenate(labels), cfg.feature_names, cfg.class_names)
    logger.debug("generated %s: n=%d counts=%s", cfg.name, ds.n_samples, ds.class_counts().tolist())
    return ds, list(cfg.rules)


def write_generated(ds: Dataset, rules: List[DomainRule], out_dir, name: str, meta: Dict) -> Dict[str, Path]:
    """Writes ``<name>.csv``, ``<name>.rules.json`` and ``<name>.meta.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": write_csv(ds, out_dir / f"{name}.csv"),
        "rules": write_rules_json(rules, out_dir / f"{name}.rules.json"),
        "meta": out_dir / f"{name}.meta.json",
    }
    meta = dict(meta, n_samples=ds.n_samples, class_counts=dict(zip(ds.class_names, ds.class_counts().tolist())))
    paths["meta"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths


if __name__ == "__main__":
    config = load_domain_config("healthcare")
    data, domain_rules = generate_domain(config, seed=7)
    print(config.name, data.n_samples, data.class_counts(), [str(rule) for rule in domain_rules])
