from __future__ import annotations

import itertools
import logging
import math

import numpy as np
import pandas as pd
import pytest
from scipy.stats import f as f_dist

from tests.conftest import make_record
from tricolor.errors import ContractViolation, UnsupportedTableEntry
from tricolor.stats import (
    bonferroni_dunn_cd,
    friedman,
    instance_scores,
    matrices_from_scores,
    rank_rows,
    score_matrices,
    significance_report,
)


def _naive_ranks(row, higher_is_better):
    values = [-v for v in row] if higher_is_better else list(row)
    ordered = sorted(values)
    return [ordered.index(v) + 1 + (ordered.count(v) - 1) / 2.0 for v in values]


def _naive_friedman(matrix, higher_is_better):
    N, k = len(matrix), len(matrix[0])
    ranks = [_naive_ranks(row, higher_is_better) for row in matrix]
    avg = [sum(r[j] for r in ranks) / N for j in range(k)]
    chi2 = 12.0 * N / (k * (k + 1)) * (sum(a * a for a in avg) - k * (k + 1) ** 2 / 4.0)
    ff = (N - 1) * chi2 / (N * (k - 1) - chi2)
    return avg, chi2, ff, 1 - f_dist.cdf(ff, k - 1, (k - 1) * (N - 1))


def test_all_tied_is_degenerate():
    result = friedman(np.full((6, 4), 0.7))
    assert np.allclose(result.avg_ranks, 2.5)
    assert result.statistic == 0.0 and result.p_value == 1.0


def test_strictly_best_algorithm_ranks_first():
    rng = np.random.default_rng(2)
    scores = rng.uniform(0, 0.5, (8, 3))
    scores[:, 1] = 1.0
    assert friedman(scores, higher_is_better=True).avg_ranks[1] == 1.0
    assert friedman(-scores, higher_is_better=False).avg_ranks[1] == 1.0


def test_identical_rankings_everywhere():
    scores = np.tile([3.0, 2.0, 1.0], (5, 1))
    result = friedman(scores)
    assert result.avg_ranks.tolist() == [1.0, 2.0, 3.0]
    assert result.p_value == 0.0 and math.isinf(result.statistic)


def test_matches_naive_rank_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(50):
        N, k = int(rng.integers(4, 15)), int(rng.integers(2, 7))
        matrix = rng.integers(0, 5, (N, k)).astype(float)
        avg, chi2, ff, p = _naive_friedman(matrix.tolist(), True)
        result = friedman(matrix)
        assert result.avg_ranks == pytest.approx(avg)
        if chi2 <= 1e-12 or N * (k - 1) - chi2 <= 0:
            continue
        assert result.chi_square == pytest.approx(chi2)
        assert result.statistic == pytest.approx(ff)
        assert result.p_value == pytest.approx(p, abs=1e-9)
        checked += 1
    assert checked > 30


def test_rank_sums_per_instance():
    rng = np.random.default_rng(5)
    matrix = rng.integers(0, 3, (20, 5)).astype(float)
    ranks = rank_rows(matrix, higher_is_better=True)
    assert np.allclose(ranks.sum(axis=1), 5 * 6 / 2)


def test_tie_handling_over_all_weak_orderings():
    orderings = {tuple(_naive_ranks(values, False)) for values in itertools.product(range(3), repeat=3)}
    assert len(orderings) == 13
    for values in itertools.product(range(3), repeat=3):
        assert rank_rows(np.array([values], dtype=float), False)[0].tolist() == _naive_ranks(values, False)


def test_invariant_under_monotone_transform():
    rng = np.random.default_rng(7)
    matrix = rng.uniform(0, 1, (12, 4))
    assert friedman(np.exp(3 * matrix)).statistic == pytest.approx(friedman(matrix).statistic)


def test_friedman_validation():
    with pytest.raises(ContractViolation):
        friedman([[1.0, 2.0]])
    with pytest.raises(ContractViolation):
        friedman([[1.0], [2.0]])
    with pytest.raises(ContractViolation):
        friedman([[1.0, np.nan], [2.0, 1.0]])


def test_critical_difference_values():
    assert bonferroni_dunn_cd(4, 10, 0.05) == pytest.approx(2.394 * math.sqrt(20 / 60))
    assert bonferroni_dunn_cd(4, 10, 0.05) == pytest.approx(1.38218, abs=1e-5)
    assert bonferroni_dunn_cd(6, 350, 0.05) == pytest.approx(0.364302, abs=1e-5)
    assert bonferroni_dunn_cd(3, 40, 0.10) == pytest.approx(1.960 * math.sqrt(12 / 240))
    assert bonferroni_dunn_cd(5, 36) == pytest.approx(bonferroni_dunn_cd(5, 9) / 2)
    assert bonferroni_dunn_cd(2, 16) == pytest.approx(1.960 * math.sqrt(1 / 16))


def test_critical_difference_unsupported_entries():
    with pytest.raises(UnsupportedTableEntry) as info:
        bonferroni_dunn_cd(4, 10, 0.01)
    assert info.value.supported == [0.05, 0.10]
    with pytest.raises(UnsupportedTableEntry):
        bonferroni_dunn_cd(11, 10, 0.05)
    with pytest.raises(ContractViolation):
        bonferroni_dunn_cd(1, 10)
    with pytest.raises(ContractViolation):
        bonferroni_dunn_cd(3, 10, 1.5)


def _records(sr_by_algorithm, instances=12, runs=10, p=0.009, graph_type="uni"):
    records = []
    for algorithm, sr in sr_by_algorithm.items():
        for seed in range(1, instances + 1):
            for run in range(runs):
                records.append(make_record(
                    algorithm=algorithm, graph_type=graph_type, n=1000, p=p, seed=seed, run=run,
                    success=run < round(sr * runs), evals=2000,
                ))
    return records


def test_instance_scores_break_sr_ties_by_aes():
    records = [make_record(algorithm="a", run=r, evals=500) for r in range(4)]
    records += [make_record(algorithm="b", run=r, evals=900) for r in range(4)]
    records += [make_record(algorithm="c", run=r, success=r < 3, evals=10) for r in range(4)]
    scores = instance_scores(records).set_index("algorithm")["score"]
    assert scores["a"] > scores["b"] > scores["c"]


def test_significance_report_separates_clear_winner():
    records = _records({"hsaea": 1.0, "tabucol": 0.9, "sawea": 0.0})
    (sig,) = significance_report(score_matrices(records), alpha=0.05)
    assert sig.group == ("uni", 0.009)
    assert sig.algorithms == ["hsaea", "sawea", "tabucol"]
    assert sig.significantly_different("hsaea", "sawea")
    best_hi = sig.intervals[sig.algorithms.index("hsaea")][1]
    worst_lo = sig.intervals[sig.algorithms.index("sawea")][0]
    assert best_hi < worst_lo
    frame = sig.to_frame()
    assert set(frame.columns) >= {"algorithm", "avg_rank", "lo", "hi", "cd", "p_value"}


def test_significance_report_skips_incomplete_groups(caplog):
    records = _records({"hsaea": 1.0, "tabucol": 0.9}, p=0.009)
    records += _records({"hsaea": 1.0}, p=0.007)
    with caplog.at_level(logging.WARNING, logger="tricolor.stats"):
        report = significance_report(score_matrices(records))
    assert [sig.group for sig in report] == [("uni", 0.009)]
    assert "missing results for tabucol" in caplog.text


def test_matrices_from_scores_round_trip(tmp_path):
    per = instance_scores(_records({"hsaea": 1.0, "sawea": 0.5}))
    path = tmp_path / "instances.csv"
    per.to_csv(path, index=False)

    (matrix,) = matrices_from_scores(pd.read_csv(path), ["graph_type"])
    assert matrix.scores.shape == (12, 2)
    with pytest.raises(ContractViolation):
        matrices_from_scores(per.drop(columns=["score"]))
