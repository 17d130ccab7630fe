import math

import numpy as np
import pytest

from slicemarket.auction import (
    Bid,
    bidder_utility,
    build_increments,
    cprp_price,
    lif_allocate,
    run_slice_auction,
    vwpfa_run,
)
from slicemarket.oracle import exact_p4, p4_objective

LN = math.log


def reference_bids():
    # Two competitors for one slice: values 4.5 and 6.0, three requests each,
    # reserve 1.6 (the slice base price), epsilon 1.
    return [Bid(3, 4.5, 3), Bid(4, 6.0, 3)]


class TestIncrements:
    def test_strictly_decreasing(self):
        incs = build_increments(Bid(1, 2.5, 6), 1.0)
        values = [i.value for i in incs]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert [i.unit_index for i in incs] == [1, 2, 3, 4, 5, 6]

    def test_explicit_values(self):
        incs = build_increments(Bid(4, 6.0, 3), 1.0)
        expect = [6 * LN(2), 6 * (LN(3) - LN(2)), 6 * (LN(4) - LN(3))]
        assert np.allclose([i.value for i in incs], expect, atol=1e-12)


class TestLifAllocate:
    def test_reference_instance(self):
        quotas = lif_allocate(3, reference_bids(), 1.6, 1.0)
        assert quotas == {3: 1, 4: 2}

    def test_single_bidder_demand_cap(self):
        assert lif_allocate(5, [Bid(7, 2.0, 3)], 1.0, 1.0) == {7: 3}

    def test_all_below_reserve(self):
        assert lif_allocate(3, [Bid(1, 0.5, 2), Bid(2, 0.9, 2)], 1.0, 1.0) == {1: 0, 2: 0}

    def test_bid_equal_reserve_participates(self):
        assert lif_allocate(2, [Bid(1, 1.0, 2)], 1.0, 1.0) == {1: 2}

    def test_equal_increment_tie_goes_to_lower_id(self):
        assert lif_allocate(1, [Bid(9, 3.0, 1), Bid(2, 3.0, 1)], 1.0, 1.0) == {9: 0, 2: 1}


class TestCprpPrice:
    def test_reference_prices(self):
        outcome = run_slice_auction(3, reference_bids(), 1.6, 1.0)
        assert outcome.quotas == {3: 1, 4: 2}
        # First price of the two-quota winner: its smallest kept increment
        # (6 ln 1.5) against the top losing rival increment (4.5 ln 1.5).
        assert outcome.prices[4][0] == pytest.approx(4.5, abs=1e-9)
        assert outcome.prices[4][1] == pytest.approx(4.5 * LN(4 / 3) / LN(2), abs=1e-9)
        assert outcome.prices[3][0] == pytest.approx(6.0 * LN(4 / 3) / LN(2), abs=1e-9)

    def test_no_rival_losers_prices_at_reserve(self):
        assert cprp_price([2.0, 1.4], [], 5.0, 1.25) == [1.25, 1.25]

    def test_bulk_pricing_after_reserve_hit(self):
        # A tiny rival loser makes the first critical price fall below the
        # reserve; everything from there on is the reserve.
        prices = cprp_price([3.0, 2.0, 1.5], [0.01], 5.0, 1.0)
        assert prices == [1.0, 1.0, 1.0]


class TestRunSliceAuction:
    def test_single_tenant_pays_reserve(self):
        outcome = run_slice_auction(4, [Bid(5, 5.0, 6)], 2.0, 1.0)
        assert outcome.quotas == {5: 4}
        assert outcome.prices[5] == [2.0, 2.0, 2.0, 2.0]

    def test_below_reserve_bidders_absorb_residual(self):
        outcome = run_slice_auction(3, [Bid(1, 0.5, 1), Bid(2, 0.4, 1)], 1.0, 1.0)
        assert outcome.auction_quotas == {1: 0, 2: 0}
        assert outcome.residual_quotas == {1: 1, 2: 1}
        assert outcome.prices[1] == [1.0] and outcome.prices[2] == [1.0]
        assert sum(outcome.quotas.values()) == 2  # demand-capped, 1 unassigned

    def test_offered_zero_is_empty(self):
        outcome = run_slice_auction(0, reference_bids(), 1.6, 1.0)
        assert all(q == 0 for q in outcome.quotas.values())
        assert all(p == [] for p in outcome.prices.values())

    def test_vwpfa_run_per_slice(self):
        outcomes = vwpfa_run(
            offered={3: 3, 4: 2},
            bids={3: reference_bids(), 4: [Bid(5, 5.0, 6)]},
            reserves={3: 1.6, 4: 2.0},
            epsilon=1.0,
        )
        assert outcomes[3].quotas == {3: 1, 4: 2}
        assert outcomes[4].quotas == {5: 2}
        assert outcomes[4].prices[5] == [2.0, 2.0]

    def test_conservation(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            n = int(rng.integers(1, 5))
            bids = [
                Bid(i, float(rng.uniform(0.2, 6.0)), int(rng.integers(0, 6)))
                for i in range(n)
            ]
            offered = int(rng.integers(0, 7))
            reserve = float(rng.uniform(0.5, 3.0))
            outcome = run_slice_auction(offered, bids, reserve, 1.0)
            total_demand = sum(b.demand for b in bids)
            assert sum(outcome.quotas.values()) == min(offered, total_demand)

    def test_price_bounds_for_clearing_bidders(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            bids = [
                Bid(i, float(rng.uniform(0.5, 8.0)), int(rng.integers(1, 6)))
                for i in range(int(rng.integers(1, 5)))
            ]
            reserve = float(rng.uniform(0.5, 3.0))
            outcome = run_slice_auction(int(rng.integers(0, 7)), bids, reserve, 1.0)
            for b in bids:
                if b.amount >= reserve:
                    for p in outcome.prices[b.vsp_id]:
                        assert reserve - 1e-9 <= p <= b.amount + 1e-9

    def test_revenue_floor(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            bids = [
                Bid(i, float(rng.uniform(0.5, 8.0)), int(rng.integers(0, 6)))
                for i in range(int(rng.integers(1, 5)))
            ]
            reserve = float(rng.uniform(0.5, 3.0))
            outcome = run_slice_auction(int(rng.integers(0, 7)), bids, reserve, 1.0)
            allocated = sum(outcome.quotas.values())
            assert outcome.revenue() >= allocated * reserve - 1e-9


class TestMechanismProperties:
    def test_lif_matches_exhaustive_optimum(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            bids = [
                Bid(i, float(rng.uniform(0.5, 6.0)), int(rng.integers(0, 5)))
                for i in range(int(rng.integers(1, 4)))
            ]
            offered = int(rng.integers(0, 7))
            reserve = float(rng.uniform(0.5, 3.0))
            quotas = lif_allocate(offered, bids, reserve, 1.0)
            _, best = exact_p4(offered, bids, reserve, 1.0)
            assert p4_objective(quotas, bids, 1.0) == pytest.approx(best, abs=1e-9)

    def test_monotone_in_own_bid(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n = int(rng.integers(2, 5))
            bids = [
                Bid(i, float(rng.uniform(0.5, 6.0)), int(rng.integers(1, 5)))
                for i in range(n)
            ]
            offered = int(rng.integers(1, 7))
            reserve = float(rng.uniform(0.5, 3.0))
            target = int(rng.integers(n))
            before = lif_allocate(offered, bids, reserve, 1.0)[target]
            raised = [
                Bid(b.vsp_id, b.amount + (2.0 if i == target else 0.0), b.demand)
                for i, b in enumerate(bids)
            ]
            after = lif_allocate(offered, raised, reserve, 1.0)[target]
            assert after >= before

    def test_truthful_bidding_dominates_sampled_deviations(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            n = int(rng.integers(1, 5))
            values = rng.uniform(0.5, 8.0, size=n)
            demands = rng.integers(1, 6, size=n)
            offered = int(rng.integers(1, 7))
            reserve = float(rng.uniform(0.5, 3.0))
            target = int(rng.integers(n))
            truthful = [Bid(i, float(values[i]), int(demands[i])) for i in range(n)]
            base = bidder_utility(
                run_slice_auction(offered, truthful, reserve, 1.0), target, values[target]
            )
            for dev in rng.uniform(0.5, 8.0, size=3):
                bids = [
                    Bid(i, float(dev) if i == target else float(values[i]), int(demands[i]))
                    for i in range(n)
                ]
                dev_util = bidder_utility(
                    run_slice_auction(offered, bids, reserve, 1.0), target, values[target]
                )
                assert dev_util <= base + 1e-9
