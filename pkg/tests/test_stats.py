"""Correlations, chi-square, multiplicity adjustment, and cohort summaries."""

import numpy as np
import pytest

from convometrics.errors import (
    ConstantInput,
    LengthMismatch,
    NoCompleteParticipants,
    OutOfRange,
    ZeroMargin,
)
from convometrics.metrics import EstimatorClass, SuccessLabel
from convometrics.stats import (
    ContingencyTable2x2,
    SessionRecord,
    chi_square_2x2,
    estimator_breakdown,
    group_summary,
    pearson,
    stepdown_adjust,
    success_transition_table,
)


class TestPearson:
    def test_identity(self):
        assert pearson([1, 2, 3, 4], [1, 2, 3, 4]).r == pytest.approx(1.0)

    def test_affine_anticorrelation(self):
        x = [1.0, 2.0, 3.0, 5.0]
        y = [-2 * v + 7 for v in x]
        result = pearson(x, y)
        assert result.r == pytest.approx(-1.0)
        assert result.p_two_sided == 0.0

    def test_hand_computed_r(self):
        assert pearson([1, 2, 3, 4], [2, 1, 4, 3]).r == pytest.approx(0.6)

    def test_p_value_against_scipy(self):
        from scipy.stats import pearsonr
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(4, 40))
            x = rng.normal(0, 1, n)
            y = rng.normal(0, 1, n) + 0.5 * x
            mine = pearson(x, y)
            reference = pearsonr(x, y)
            assert mine.r == pytest.approx(reference.statistic, abs=1e-12)
            assert mine.p_two_sided == pytest.approx(reference.pvalue, rel=1e-9)

    def test_affine_invariance(self):
        rng = np.random.default_rng(1)
        x = rng.normal(0, 1, 20)
        y = rng.normal(0, 1, 20)
        base = pearson(x, y).r
        transformed = pearson(3.0 * x + 11.0, 0.5 * y - 4.0).r
        assert transformed == pytest.approx(base, abs=1e-12)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2, 3], [1, 2])
        with pytest.raises(LengthMismatch):
            pearson([1, 2], [1, 2])
        with pytest.raises(ConstantInput):
            pearson([1, 1, 1], [1, 2, 3])


class TestChiSquare:
    def test_published_anchor(self):
        result = chi_square_2x2(ContingencyTable2x2(20, 3, 12, 16))
        assert result["chi2"] == pytest.approx(10.51, abs=0.02)
        assert result["p"] < 0.0012
        assert result["n"] == 51

    def test_independence(self):
        result = chi_square_2x2(ContingencyTable2x2(10, 10, 10, 10))
        assert result["chi2"] == 0.0

    def test_diagonal_hand_value(self):
        result = chi_square_2x2(ContingencyTable2x2(5, 0, 0, 5))
        assert result["chi2"] == pytest.approx(10.0)
        assert result["p"] == pytest.approx(0.001565, abs=1e-5)

    def test_transposition_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a, b, c, d = rng.integers(1, 40, 4)
            direct = chi_square_2x2(ContingencyTable2x2(a, b, c, d))
            swapped = chi_square_2x2(ContingencyTable2x2(a, c, b, d))
            assert direct["chi2"] == pytest.approx(swapped["chi2"], abs=1e-12)

    def test_zero_margin(self):
        with pytest.raises(ZeroMargin):
            chi_square_2x2(ContingencyTable2x2(0, 0, 5, 5))


class TestStepdown:
    def test_single(self):
        assert stepdown_adjust([0.03]) == [0.03]

    def test_holm_by_hand(self):
        assert stepdown_adjust([0.01, 0.04]) == pytest.approx([0.02, 0.04])

    def test_never_decreases_and_monotone(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p = rng.uniform(0, 1, int(rng.integers(1, 10)))
            adjusted = stepdown_adjust(list(p))
            assert all(a >= raw - 1e-15 for a, raw in zip(adjusted, p))
            order = np.argsort(p)
            sorted_adjusted = [adjusted[i] for i in order]
            assert sorted_adjusted == sorted(sorted_adjusted)

    def test_permutation_equivariance(self):
        p = [0.04, 0.001, 0.2, 0.03]
        adjusted = stepdown_adjust(p)
        perm = [2, 0, 3, 1]
        permuted = stepdown_adjust([p[i] for i in perm])
        assert permuted == [adjusted[i] for i in perm]

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            stepdown_adjust([0.5, 1.5])


def record(pid, scenario, impact, survey_i, self_estimate=None, estimator=None):
    success = SuccessLabel.SUCCESSFUL if survey_i >= 7 else SuccessLabel.UNSUCCESSFUL
    return SessionRecord(
        session_id=f"{pid}-s{scenario}", participant_id=pid, scenario_id=scenario,
        impact_value=impact, survey_i=survey_i, survey_p=survey_i,
        success=success, self_estimate=self_estimate, estimator_class=estimator,
    )


def participant(pid, impacts, surveys):
    return [record(pid, s, impacts[s - 1], surveys[s - 1]) for s in (1, 2, 3, 4)]


class TestGroupSummary:
    def test_single_participant(self):
        cells = group_summary(participant("p1", [10, 20, 30, 40], [8, 8, 8, 8]))
        assert len(cells) == 4
        assert [c.mean for c in cells] == [10, 20, 30, 40]
        assert all(c.se is None and c.n == 1 for c in cells)
        assert all(c.group == "successful" for c in cells)

    def test_identical_participants_zero_se(self):
        records = participant("p1", [5, 5, 5, 5], [3, 3, 3, 3]) + \
            participant("p2", [5, 5, 5, 5], [3, 3, 3, 3])
        cells = group_summary(records)
        assert all(c.se == 0.0 for c in cells)

    def test_planted_group_gap_recovered(self):
        rng = np.random.default_rng(4)
        records = []
        for k in range(10):
            records += participant(f"hi{k}", [100.0] * 4, [9, 9, 9, 9])
            records += participant(f"lo{k}", [40.0] * 4, [3, 3, 3, 3])
        cells = group_summary(records)
        by_key = {(c.group, c.scenario): c for c in cells}
        for scenario in (1, 2, 3, 4):
            assert by_key[("successful", scenario)].mean == pytest.approx(100.0, abs=1e-9)
            assert by_key[("unsuccessful", scenario)].mean == pytest.approx(40.0, abs=1e-9)

    def test_incomplete_participant_changes_nothing(self):
        base = participant("p1", [1, 2, 3, 4], [8, 8, 8, 8])
        extra = [record("p2", 1, 99.0, 9)]  # scenario 1 only
        assert group_summary(base) == group_summary(base + extra)

    def test_no_complete(self):
        with pytest.raises(NoCompleteParticipants):
            group_summary([record("p1", 1, 5.0, 5)])


class TestTransitionTable:
    def test_paper_counts_reconstruction(self):
        records = []
        k = 0
        # 20 stay successful, 3 drop, 12 rise, 16 stay unsuccessful
        for _ in range(20):
            records += participant(f"p{k}", [0] * 4, [8, 5, 5, 8]); k += 1
        for _ in range(3):
            records += participant(f"p{k}", [0] * 4, [8, 5, 5, 3]); k += 1
        for _ in range(12):
            records += participant(f"p{k}", [0] * 4, [3, 5, 5, 8]); k += 1
        for _ in range(16):
            records += participant(f"p{k}", [0] * 4, [3, 5, 5, 3]); k += 1
        table = success_transition_table(records)
        assert (table.a, table.b, table.c, table.d) == (20, 3, 12, 16)
        assert chi_square_2x2(table)["chi2"] == pytest.approx(10.51, abs=0.02)

    def test_no_changes(self):
        records = participant("p1", [0] * 4, [8, 8, 8, 8]) + \
            participant("p2", [0] * 4, [3, 3, 3, 3])
        table = success_transition_table(records)
        assert (table.b, table.c) == (0, 0)

    def test_single_riser(self):
        table = success_transition_table(participant("p1", [0] * 4, [3, 5, 5, 8]))
        assert (table.a, table.b, table.c, table.d) == (0, 0, 1, 0)

    def test_marginals_match_per_scenario_counts(self):
        rng = np.random.default_rng(5)
        records = []
        for k in range(30):
            surveys = list(rng.integers(1, 11, 4))
            records += participant(f"p{k}", [0] * 4, surveys)
        table = success_transition_table(records)
        s1 = sum(1 for r in records if r.scenario_id == 1
                 and r.success is SuccessLabel.SUCCESSFUL)
        s4 = sum(1 for r in records if r.scenario_id == 4
                 and r.success is SuccessLabel.SUCCESSFUL)
        assert table.a + table.b == s1
        assert table.a + table.c == s4


class TestEstimatorBreakdown:
    def test_all_excluded_empty(self):
        records = [record("p1", 1, 0, 9, 9, EstimatorClass.EXCLUDED)]
        assert estimator_breakdown(records) == {}

    def test_known_mix(self):
        records = [
            record("p1", 1, 0, 8, 8, EstimatorClass.ACCURATE),
            record("p2", 1, 0, 5, 5, EstimatorClass.ACCURATE),
            record("p3", 1, 0, 8, 4, EstimatorClass.UNDER_ESTIMATOR),
            record("p4", 1, 0, 4, 8, EstimatorClass.OVER_ESTIMATOR),
            record("p5", 1, 0, 4, 8, EstimatorClass.OVER_ESTIMATOR),
        ]
        out = estimator_breakdown(records)
        assert out["accurate"] == {"n": 2, "success_rate": 0.5}
        assert out["under_estimator"] == {"n": 1, "success_rate": 1.0}
        assert out["over_estimator"] == {"n": 2, "success_rate": 0.0}
