# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

LE = "<="
GT = ">"
OPERATORS = (LE, GT)

# The other two comparison forms normalise onto the canonical pair
_ALIASES = {"<=": LE, "≤": LE, "<": LE, ">": GT, ">=": GT, "≥": GT}


@dataclass(frozen=True, order=True)
class Predicate:
    """
    An axis-aligned test ``x[feature] <op> threshold`` with op in {<=, >}.
    A sample that takes the left branch of a split satisfies the <= form.
    """
    feature: int
    op: str
    threshold: float

    def __post_init__(self):
        op = _ALIASES.get(self.op)
        if op is None:
            raise ValueError(f"unsupported operator '{self.op}'")
        if not np.isfinite(self.threshold):
            raise ValueError("predicate threshold must be finite")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "feature", int(self.feature))
        object.__setattr__(self, "threshold", float(self.threshold))

    def quantized(self, decimals: int) -> "Predicate":
        return Predicate(self.feature, self.op, round(self.threshold, decimals))

    def holds(self, x: Sequence[float]) -> bool:
        value = x[self.feature]
        return value <= self.threshold if self.op == LE else value > self.threshold

    def describe(self, feature_names: Optional[Sequence[str]] = None) -> str:
        name = feature_names[self.feature] if feature_names is not None else f"f{self.feature}"
        return f"{name} {self.op} {self.threshold:g}"

    def __str__(self) -> str:
        return self.describe()


def canonical_op(op: str) -> str:
    """Maps any comparison form onto ``<=`` or ``>``."""
    canonical = _ALIASES.get(str(op).strip())
    if canonical is None:
        raise ValueError(f"unsupported operator '{op}'")
    return canonical
