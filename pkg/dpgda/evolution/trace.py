# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from dpgda.evolution.fitness import Candidate


@dataclass(frozen=True, eq=False)
class TraceRecord:
    """Best individual of one generation and how it moved since the previous one."""
    generation: int
    best: Candidate
    # vs previous generation's best; generation 0 is measured against the query
    delta: np.ndarray
    violations: Tuple[Tuple[int, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "best": self.best.x.tolist(),
            "fitness": self.best.fitness,
            "V": self.best.V,
            "A": self.best.A,
            "D": self.best.D,
            "S": self.best.S,
            "delta": self.delta.tolist(),
            "violations": [[feature, side] for feature, side in self.violations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TraceRecord":
        best = Candidate(np.asarray(data["best"], dtype=np.float64), float(data["fitness"]), int(data["V"]),
                         float(data["A"]), float(data["D"]), float(data["S"]))
        return cls(int(data["generation"]), best, np.asarray(data["delta"], dtype=np.float64),
                   tuple((int(f), str(side)) for f, side in data.get("violations", [])))


@dataclass(eq=False)
class Trace:
    """Everything one evolve call did for a single query sample."""
    query: np.ndarray
    cls: int
    query_index: Optional[int] = None
    feature_names: Tuple[str, ...] = ()
    records: List[TraceRecord] = field(default_factory=list)
    accepted: Optional[np.ndarray] = None
    attempts: int = 1

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_features(self) -> int:
        return int(self.query.shape[0])

    def names(self) -> List[str]:
        if self.feature_names:
            return list(self.feature_names)
        return [f"x{i}" for i in range(self.n_features)]

    def deltas(self) -> np.ndarray:
        """Delta matrix, shape (generations, d)."""
        if not self.records:
            return np.zeros((0, self.n_features))
        return np.vstack([record.delta for record in self.records])

    def best_fitness(self) -> np.ndarray:
        return np.array([record.best.fitness for record in self.records])

    def final(self) -> np.ndarray:
        return self.records[-1].best.x if self.records else self.query

    def augmented(self) -> np.ndarray:
        """The accepted synthetic sample; the last best when none was recorded."""
        return self.accepted if self.accepted is not None else self.final()

    def to_json(self) -> dict:
        return {
            "query_index": self.query_index,
            "class": self.cls,
            "feature_names": list(self.feature_names),
            "query": self.query.tolist(),
            "accepted": None if self.accepted is None else self.accepted.tolist(),
            "attempts": self.attempts,
            "records": [record.to_dict() for record in self.records],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trace":
        accepted = data.get("accepted")
        return cls(np.asarray(data["query"], dtype=np.float64), int(data["class"]), data.get("query_index"),
                   tuple(data.get("feature_names", ())), [TraceRecord.from_dict(r) for r in data["records"]],
                   None if accepted is None else np.asarray(accepted, dtype=np.float64), int(data.get("attempts", 1)))

    def to_frame(self) -> pd.DataFrame:
        """One row per generation: Δ per feature then fitness and its components."""
        names = self.names()
        rows = []
        for record in self.records:
            row = {"generation": record.generation}
            row.update({f"delta_{name}": value for name, value in zip(names, record.delta.tolist())})
            row.update({"fitness": record.best.fitness, "V": record.best.V, "A": record.best.A,
                        "D": record.best.D, "S": record.best.S})
            rows.append(row)
        columns = ["generation"] + [f"delta_{name}" for name in names] + ["fitness", "V", "A", "D", "S"]
        return pd.DataFrame(rows, columns=columns)

    def save(self, directory, index: Optional[int] = None) -> Tuple[Path, Path]:
        """Writes ``trace_<i>.json`` and ``trace_<i>.csv``."""
        index = self.query_index if index is None else index
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / f"trace_{index}.json"
        csv_path = directory / f"trace_{index}.csv"
        json_path.write_text(json.dumps(self.to_json()) + "\n", encoding="utf-8")
        self.to_frame().to_csv(csv_path, index=False, lineterminator="\n")
        return json_path, csv_path


def load_trace(path) -> Trace:
    return Trace.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
