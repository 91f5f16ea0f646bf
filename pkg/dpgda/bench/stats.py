# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Friedman test over methods ranked within every dataset, followed by the
Nemenyi critical difference of the mean ranks.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd
from scipy import stats as sps

from dpgda.errors import StatisticsError

# Studentized range quantiles / sqrt(2) at alpha = 0.05 for k = 2..20 methods
NEMENYI_Q_005 = {
    2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164,
    11: 3.219, 12: 3.268, 13: 3.313, 14: 3.354, 15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489,
    19: 3.517, 20: 3.544,
}


def nemenyi_q(k: int, alpha: float = 0.05) -> float:
    if k < 2:
        raise StatisticsError(f"need at least two methods, got {k}")
    if alpha == 0.05 and k in NEMENYI_Q_005:
        return NEMENYI_Q_005[k]
    return float(sps.studentized_range.ppf(1.0 - alpha, k, np.inf) / math.sqrt(2.0))


def critical_difference(k: int, n_datasets: int, alpha: float = 0.05) -> float:
    return nemenyi_q(k, alpha) * math.sqrt(k * (k + 1) / (6.0 * n_datasets))


def within_dataset_ranks(scores: np.ndarray) -> np.ndarray:
    """Rank 1 = best (highest) score in each row; ties share the average rank."""
    return np.vstack([sps.rankdata(-row, method="average") for row in scores])


def friedman_statistic(mean_ranks: np.ndarray, n_datasets: int) -> float:
    k = mean_ranks.shape[0]
    return 12.0 * n_datasets / (k * (k + 1)) * (float(np.sum(mean_ranks ** 2)) - k * (k + 1) ** 2 / 4.0)


@dataclass(frozen=True)
class RankSummary:
    methods: List[str]
    median: Dict[str, float]
    mad: Dict[str, float]
    mean_rank: Dict[str, float]
    statistic: float
    p_value: float
    critical_difference: float
    alpha: float
    n_datasets: int

    def ordered(self) -> List[str]:
        """Methods from best to worst mean rank."""
        return sorted(self.methods, key=lambda m: (self.mean_rank[m], m))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_datasets": self.n_datasets,
            "n_methods": len(self.methods),
            "friedman_statistic": self.statistic,
            "p_value": self.p_value,
            "critical_difference": self.critical_difference,
            "methods": {m: {"median": self.median[m], "mad": self.mad[m], "mean_rank": self.mean_rank[m]}
                        for m in self.ordered()},
        }

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path


def friedman_nemenyi(scores: pd.DataFrame, alpha: float = 0.05) -> RankSummary:
    """
    Rank statistics of a dataset x method score table (higher is better).

    Args:
        scores (pd.DataFrame): One row per dataset, one column per method.
        alpha (float): Significance level of the critical difference.

    Raises:
        StatisticsError: fewer than 3 methods or 2 datasets, or missing cells.
    """
    if not 0.0 < alpha < 1.0:
        raise StatisticsError(f"alpha must lie in (0, 1), got {alpha}")
    n_datasets, k = scores.shape
    if k < 3:
        raise StatisticsError(f"the Friedman test needs at least 3 methods, got {k}")
    if n_datasets < 2:
        raise StatisticsError(f"the Friedman test needs at least 2 datasets, got {n_datasets}")
    values = scores.to_numpy(dtype=np.float64)
    if np.isnan(values).any():
        rows, cols = np.nonzero(np.isnan(values))
        raise StatisticsError(f"missing score for method '{scores.columns[cols[0]]}' "
                              f"on dataset '{scores.index[rows[0]]}'")

    ranks = within_dataset_ranks(values)
    mean_ranks = ranks.mean(axis=0)
    statistic = friedman_statistic(mean_ranks, n_datasets)
    # all-tied tables can come out as -1e-15
    statistic = max(statistic, 0.0)
    p_value = float(sps.chi2.sf(statistic, k - 1))
    methods = [str(m) for m in scores.columns]
    medians = np.median(values, axis=0)
    mads = sps.median_abs_deviation(values, axis=0, scale=1.0)
    return RankSummary(
        methods=methods,
        median={m: float(v) for m, v in zip(methods, medians)},
        mad={m: float(v) for m, v in zip(methods, mads)},
        mean_rank={m: float(v) for m, v in zip(methods, mean_ranks)},
        statistic=float(statistic),
        p_value=p_value,
        critical_difference=critical_difference(k, n_datasets, alpha),
        alpha=alpha,
        n_datasets=n_datasets,
    )
