# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Domain rules and violation auditing.

A rule is a closed interval on one named feature; a sample is in the
violation space when it breaks at least one rule. Rules are read from and
written to ``rules.json``::

    {"rules": [{"feature": "Age", "lower": 0, "upper": null, "description": "..."}]}
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dpgda.errors import ConstraintError
from dpgda.tabular import Dataset

logger = logging.getLogger(__name__)


class DomainRule(BaseModel):
    """``lower <= x[feature] <= upper``; a missing side is open."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    feature: str = Field(min_length=1)
    lower: Optional[float] = None
    upper: Optional[float] = None
    description: str = ""

    @field_validator("lower", "upper", mode="after")
    @classmethod
    def _finite_or_open(cls, value: Optional[float]):
        if value is not None and math.isnan(value):
            raise ValueError("bounds cannot be NaN")
        if value is not None and math.isinf(value):
            return None
        return value

    @model_validator(mode="after")
    def _ordered(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        return self

    @property
    def low(self) -> float:
        return -math.inf if self.lower is None else self.lower

    @property
    def high(self) -> float:
        return math.inf if self.upper is None else self.upper

    def holds(self, value: float) -> bool:
        return self.low <= value <= self.high

    def __str__(self) -> str:
        if self.lower is not None and self.upper is not None:
            return f"{self.lower:g} <= {self.feature} <= {self.upper:g}"
        if self.lower is not None:
            return f"{self.feature} >= {self.lower:g}"
        if self.upper is not None:
            return f"{self.feature} <= {self.upper:g}"
        return f"{self.feature} unrestricted"


class RulesDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rules: List[DomainRule]


@dataclass(frozen=True)
class ViolationReport:
    n_synth: int
    n_violating_samples: int
    # one entry per violating sample: (sample position, indices of broken rules)
    violations: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    rules: Tuple[DomainRule, ...] = field(default=(), repr=False)

    @property
    def violation_rate(self) -> float:
        if self.n_synth == 0:
            return 0.0
        return self.n_violating_samples / self.n_synth

    def rule_counts(self) -> List[int]:
        counts = [0] * len(self.rules)
        for _, broken in self.violations:
            for index in broken:
                counts[index] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "n_synth": self.n_synth,
            "n_violating_samples": self.n_violating_samples,
            "violation_rate": self.violation_rate,
            "violations": [
                {"sample": sample, "rules": [str(self.rules[i]) for i in broken]}
                for sample, broken in self.violations
            ],
            "per_rule": {str(rule): count for rule, count in zip(self.rules, self.rule_counts())},
        }


def rules_from_json(path) -> List[DomainRule]:
    """
    Reads a rules document.

    Raises:
        ConstraintError: The file is not valid JSON or breaks the schema; the
            message carries the path to the offending key, e.g. ``rules.2.lower``.
    """
    path = Path(path)
    if not path.exists():
        raise ConstraintError(f"rules file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConstraintError(f"{path} is not valid JSON: {exc}") from exc
    return rules_from_dict(data, source=str(path))


def rules_from_dict(data: dict, source: str = "rules") -> List[DomainRule]:
    try:
        return list(RulesDocument.model_validate(data).rules)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConstraintError(f"{source}: {where}: {first['msg']}") from exc


def rules_to_dict(rules: Iterable[DomainRule]) -> dict:
    return {"rules": [rule.model_dump() for rule in rules]}


def write_rules_json(rules: Iterable[DomainRule], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(rules_to_dict(rules), indent=2) + "\n", encoding="utf-8")
    return path


def _rule_columns(rules: Sequence[DomainRule], feature_names: Sequence[str]) -> np.ndarray:
    names = list(feature_names)
    columns = []
    for rule in rules:
        if rule.feature not in names:
            raise ConstraintError(f"rule '{rule}' references unknown feature '{rule.feature}'")
        columns.append(names.index(rule.feature))
    return np.asarray(columns, dtype=np.int64)


def audit(samples: Dataset, rules: Sequence[DomainRule]) -> ViolationReport:
    """
    Checks every row of `samples` against every rule (closed intervals).
    A sample counts once toward the rate however many rules it breaks.
    """
    rules = tuple(rules)
    n = samples.n_samples
    if not rules:
        return ViolationReport(n, 0, (), rules)
    columns = _rule_columns(rules, samples.feature_names)
    values = samples.features[:, columns]
    low = np.array([rule.low for rule in rules])
    high = np.array([rule.high for rule in rules])
    broken = (values < low) | (values > high)
    violating = np.flatnonzero(broken.any(axis=1))
    violations = tuple((int(i), tuple(int(r) for r in np.flatnonzero(broken[i]))) for i in violating)
    report = ViolationReport(n, int(violating.size), violations, rules)
    logger.debug("audit: %d of %d samples violate %d rules", report.n_violating_samples, n, len(rules))
    return report


def mean_rate_over_runs(reports: Sequence[ViolationReport]) -> float:
    if not reports:
        raise ConstraintError("mean_rate_over_runs needs at least one report")
    return float(np.mean([report.violation_rate for report in reports]))


def bounds_to_rules(bounds, cls: int, feature_names: Sequence[str]) -> List[DomainRule]:
    """Turns the box of one class into rules, one per bounded feature."""
    if len(feature_names) != bounds.n_features:
        raise ConstraintError(f"{len(feature_names)} feature names for {bounds.n_features} features")
    lower, upper = bounds.arrays(cls)
    rules = []
    for feature, name in enumerate(feature_names):
        lo, hi = float(lower[feature]), float(upper[feature])
        if math.isinf(lo) and math.isinf(hi):
            continue
        rules.append(DomainRule(feature=name, lower=None if math.isinf(lo) else lo,
                                upper=None if math.isinf(hi) else hi, description=f"class {cls} bound"))
    return rules


SUMMARY_COLUMNS = ["method", "dataset", "level", "rate"]


def violation_summary(rows: Iterable[Tuple[str, str, float, ViolationReport]]) -> pd.DataFrame:
    """
    CSV-ready summary: one row per (method, dataset, level) with the rate
    averaged over the runs given for that cell.
    """
    records = [{"method": method, "dataset": dataset, "level": level, "rate": report.violation_rate}
               for method, dataset, level, report in rows]
    frame = pd.DataFrame(records, columns=SUMMARY_COLUMNS)
    if frame.empty:
        return frame
    return frame.groupby(["method", "dataset", "level"], as_index=False, sort=True)["rate"].mean()


if __name__ == "__main__":
    loan = [
        DomainRule(feature="Age", lower=30, description="applicant age"),
        DomainRule(feature="Income", lower=45),
        DomainRule(feature="CreditScore", lower=600),
        DomainRule(feature="NumChildren", upper=3),
    ]
    candidates = Dataset(np.array([[52.0, 60.0, 590.0, 3.0], [40.0, 50.0, 700.0, 1.0]]), np.array([0, 0]),
                         ("Age", "Income", "CreditScore", "NumChildren"), ("approved",))
    print(json.dumps(audit(candidates, loan).to_dict(), indent=2))
