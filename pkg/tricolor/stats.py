"""
Friedman test over algorithm ranks and the Bonferroni-Dunn critical difference.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import f as f_dist
from scipy.stats import rankdata

from tricolor.errors import ContractViolation, UnsupportedTableEntry
from tricolor.records import RunRecord

logger = logging.getLogger(__name__)

# Bonferroni-Dunn critical values (two-tailed, k - 1 comparisons with a control),
# Demsar, JMLR 7 (2006), Table 5(b).
Q_BONFERRONI_DUNN: Dict[float, Dict[int, float]] = {
    0.05: {2: 1.960, 3: 2.241, 4: 2.394, 5: 2.498, 6: 2.576, 7: 2.638, 8: 2.690, 9: 2.724, 10: 2.773},
    0.10: {2: 1.645, 3: 1.960, 4: 2.128, 5: 2.241, 6: 2.326, 7: 2.394, 8: 2.450, 9: 2.498, 10: 2.539},
}


@dataclass(frozen=True)
class FriedmanResult:
    avg_ranks: np.ndarray
    chi_square: float
    statistic: float
    p_value: float


def rank_rows(scores: np.ndarray, higher_is_better: bool) -> np.ndarray:
    """Per-row ranks, 1 = best, ties share the average rank."""
    data = -scores if higher_is_better else scores
    return rankdata(data, method="average", axis=1)


def friedman(scores: Sequence[Sequence[float]], higher_is_better: bool = True) -> FriedmanResult:
    """
    Friedman test with the Iman-Davenport F refinement.

    Args:
        scores: N x k matrix, one row per instance and one column per algorithm
        higher_is_better: whether larger scores rank first

    Returns:
        FriedmanResult with average ranks, chi-square, F statistic and its p-value
    """
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2:
        raise ContractViolation("scores must be a 2-D matrix")
    N, k = matrix.shape
    if N < 2 or k < 2:
        raise ContractViolation(f"need at least 2 instances and 2 algorithms, got {N} x {k}")
    if np.isnan(matrix).any():
        raise ContractViolation("scores must be complete (no missing values)")

    avg_ranks = rank_rows(matrix, higher_is_better).mean(axis=0)
    chi_square = 12.0 * N / (k * (k + 1)) * (float(np.sum(avg_ranks ** 2)) - k * (k + 1) ** 2 / 4.0)
    # float noise around an all-tied matrix
    if chi_square <= 1e-12:
        return FriedmanResult(avg_ranks=avg_ranks, chi_square=0.0, statistic=0.0, p_value=1.0)

    denominator = N * (k - 1) - chi_square
    if denominator <= 0:
        # identical ranking on every instance
        return FriedmanResult(avg_ranks=avg_ranks, chi_square=chi_square, statistic=math.inf, p_value=0.0)
    statistic = (N - 1) * chi_square / denominator
    p_value = float(f_dist.sf(statistic, k - 1, (k - 1) * (N - 1)))
    return FriedmanResult(avg_ranks=avg_ranks, chi_square=chi_square, statistic=statistic, p_value=p_value)


def bonferroni_dunn_cd(k: int, N: int, alpha: float = 0.05) -> float:
    """CD = q_alpha * sqrt(k (k + 1) / (6 N))."""
    if k < 2 or N < 1:
        raise ContractViolation(f"need k >= 2 and N >= 1, got k={k}, N={N}")
    if not 0 < alpha < 1:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
    table = Q_BONFERRONI_DUNN.get(round(alpha, 4))
    if table is None:
        raise UnsupportedTableEntry(f"alpha={alpha}", Q_BONFERRONI_DUNN)
    if k not in table:
        raise UnsupportedTableEntry(f"k={k} at alpha={alpha}", table)
    return table[k] * math.sqrt(k * (k + 1) / (6.0 * N))


@dataclass
class ScoreMatrix:
    group: Tuple
    instances: List[str]
    algorithms: List[str]
    scores: np.ndarray


def instance_scores(records: Iterable[RunRecord]) -> pd.DataFrame:
    """
    One row per (algorithm, instance): SR, AES and a ranking score.

    The score is SR with AES as tie-breaker (lower AES scores higher at equal SR). The
    tie-break term stays below half an SR step so it can never reorder different SRs.
    """
    frame = pd.DataFrame([r.to_dict() for r in records])
    if frame.empty:
        raise ContractViolation("no records to score")
    per = frame.groupby(["graph_type", "n", "p", "delta", "instance_id", "algorithm"], dropna=False).agg(
        runs=("success", "size"),
        SR=("success", "mean"),
        AES=("evals_to_solution", "mean"),
    ).reset_index()
    max_runs = int(per["runs"].max())
    ceiling = float(per["AES"].max()) + 1.0 if per["AES"].notna().any() else 1.0
    tie_break = (1.0 - per["AES"] / ceiling).fillna(0.0) / (2.0 * max_runs)
    per["score"] = per["SR"] + tie_break
    return per


def score_matrices(
    records: Iterable[RunRecord],
    group_by: Sequence[str] = ("graph_type", "p"),
    algorithms: Optional[Sequence[str]] = None,
) -> List[ScoreMatrix]:
    """Instances x algorithms score matrices, one per group (missing cells are NaN)."""
    return matrices_from_scores(instance_scores(records), group_by, algorithms)


def matrices_from_scores(
    per: pd.DataFrame,
    group_by: Sequence[str] = ("graph_type", "p"),
    algorithms: Optional[Sequence[str]] = None,
) -> List[ScoreMatrix]:
    """Same as score_matrices, starting from an `instance_scores` table (e.g. read back from CSV)."""
    missing = {"instance_id", "algorithm", "score", *group_by} - set(per.columns)
    if missing:
        raise ContractViolation(f"score table lacks columns {sorted(missing)}")
    algos = list(algorithms) if algorithms is not None else sorted(per["algorithm"].unique())
    matrices: List[ScoreMatrix] = []
    for key, group in per.groupby(list(group_by), dropna=False, sort=True):
        key = key if isinstance(key, tuple) else (key,)
        wide = group.pivot(index="instance_id", columns="algorithm", values="score").reindex(columns=algos)
        matrices.append(ScoreMatrix(
            group=tuple(v.item() if hasattr(v, "item") else v for v in key),
            instances=list(wide.index),
            algorithms=algos,
            scores=wide.to_numpy(dtype=float),
        ))
    return matrices


@dataclass
class GroupSignificance:
    group: Tuple
    algorithms: List[str]
    avg_ranks: np.ndarray
    cd: float
    friedman: FriedmanResult
    intervals: List[Tuple[float, float]] = field(default_factory=list)

    def significantly_different(self, a: str, b: str) -> bool:
        i, j = self.algorithms.index(a), self.algorithms.index(b)
        return abs(float(self.avg_ranks[i] - self.avg_ranks[j])) > self.cd

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "group": [" ".join(str(v) for v in self.group)] * len(self.algorithms),
            "algorithm": self.algorithms,
            "avg_rank": self.avg_ranks,
            "lo": [lo for lo, _ in self.intervals],
            "hi": [hi for _, hi in self.intervals],
            "cd": self.cd,
            "statistic": self.friedman.statistic,
            "p_value": self.friedman.p_value,
        })


def significance_report(matrices: Iterable[ScoreMatrix], alpha: float = 0.05) -> List[GroupSignificance]:
    """
    Average ranks with +-CD/2 intervals per group; two algorithms differ significantly when
    their intervals do not overlap. Incomplete groups are skipped with a warning.
    """
    report: List[GroupSignificance] = []
    for matrix in matrices:
        if np.isnan(matrix.scores).any():
            missing = [a for a, col in zip(matrix.algorithms, matrix.scores.T) if np.isnan(col).any()]
            logger.warning("skipping group %s: missing results for %s", matrix.group, ", ".join(missing))
            continue
        if len(matrix.instances) < 2:
            logger.warning("skipping group %s: only %d instance(s)", matrix.group, len(matrix.instances))
            continue
        result = friedman(matrix.scores, higher_is_better=True)
        cd = bonferroni_dunn_cd(len(matrix.algorithms), len(matrix.instances), alpha)
        report.append(GroupSignificance(
            group=matrix.group,
            algorithms=list(matrix.algorithms),
            avg_ranks=result.avg_ranks,
            cd=cd,
            friedman=result,
            intervals=[(float(r) - cd / 2, float(r) + cd / 2) for r in result.avg_ranks],
        ))
    return report
