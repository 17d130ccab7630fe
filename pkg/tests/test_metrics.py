import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicemarket.metrics import (
    acceptance_ratio,
    inter_slice_fairness,
    slot_actual_revenue,
    slot_vwpf,
)


class TestAcceptanceRatio:
    def test_direct_division(self):
        assert acceptance_ratio(30, 40) == 0.75

    def test_zero_history_is_zero(self):
        assert acceptance_ratio(0, 0) == 0.0

    def test_full_acceptance(self):
        assert acceptance_ratio(5, 5) == 1.0

    def test_accepted_above_received_rejected(self):
        with pytest.raises(ValueError):
            acceptance_ratio(6, 5)


class TestInterSliceFairness:
    def test_equal_gaps_score_one(self):
        assert inter_slice_fairness([0.2, 0.4, 0.6, 0.8]) == pytest.approx(1.0)

    def test_negative_gap_scores_zero(self):
        assert inter_slice_fairness([0.9, 0.7, 0.5, 0.4]) == 0.0

    def test_uneven_gaps(self):
        # gaps (0.1, 0.1, 0.3): 0.5^2 / (3 * 0.11) = 25/33
        assert inter_slice_fairness([0.2, 0.3, 0.4, 0.7]) == pytest.approx(25 / 33)

    def test_all_equal_ratios_score_one(self):
        assert inter_slice_fairness([0.5, 0.5, 0.5]) == 1.0

    def test_needs_two_slices(self):
        with pytest.raises(ValueError):
            inter_slice_fairness([0.4])

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=6))
    @settings(max_examples=300)
    def test_bounded_and_one_only_for_equal_gaps(self, ratios):
        ratios = sorted(ratios)
        score = inter_slice_fairness(ratios)
        assert 0.0 <= score <= 1.0 + 1e-12
        gaps = [b - a for a, b in zip(ratios, ratios[1:])]
        if score >= 1.0 - 1e-12:
            assert max(gaps) - min(gaps) < 1e-6 or sum(gaps) == 0


class TestSlotVwpf:
    def test_zero_quotas_epsilon_one_is_zero(self):
        assert slot_vwpf({3: 0, 4: 0}, {3: 4.5, 4: 6.0}, 1.0) == 0.0

    def test_two_tenant_example(self):
        expected = 4.5 * math.log(2) + 6.0 * math.log(3)
        assert slot_vwpf({3: 1, 4: 2}, {3: 4.5, 4: 6.0}, 1.0) == pytest.approx(
            expected, abs=1e-12
        )

    def test_single_tenant_example(self):
        assert slot_vwpf({9: 3}, {9: 5.0}, 1.0) == pytest.approx(5.0 * math.log(4), abs=1e-12)

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(ValueError):
            slot_vwpf({1: 1}, {1: 1.0}, 0.0)

    def test_increasing_with_diminishing_increments(self):
        vals = {1: 3.7}
        scores = [slot_vwpf({1: q}, vals, 1.0) for q in range(8)]
        increments = [b - a for a, b in zip(scores, scores[1:])]
        assert all(i > 0 for i in increments)
        assert all(b < a for a, b in zip(increments, increments[1:]))


class TestSlotActualRevenue:
    def test_empty_sums(self):
        assert slot_actual_revenue([], []) == 0.0

    def test_direct_summation(self):
        assert slot_actual_revenue([1.6, 1.6], [2.49]) == pytest.approx(5.69)
