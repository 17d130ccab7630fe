"""Intra-slice quota auction: largest-increment-first allocation with
critical pricing floored at the base price.

Each slice's granted quota is auctioned among its tenants. Bids below the
reserve (the slice's base price) are screened out. Every remaining bidder
contributes one marginal-utility increment per demanded unit,
``bid * (ln(i + eps) - ln(i - 1 + eps))`` for unit i, and quotas go to the
globally largest increments. That allocation maximizes the value-weighted
log utility and is monotone in each bid, so charging each won unit at the
bid level where it would start losing (never below the reserve) makes
truthful bidding the dominant strategy.

Quotas still left after allocation are forced onto the screened-out bidders
at the reserve price, round-robin in id order up to their demands; those
forced sales sit outside the mechanism and are tracked separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Bid:
    vsp_id: int
    amount: float  # reported value per quota per slot
    demand: int  # requests sent to this NSP, caps the allocation


@dataclass(frozen=True)
class Increment:
    """Marginal utility of one more unit for one bidder; strictly decreasing
    in ``unit_index`` for any positive bid."""

    vsp_id: int
    unit_index: int  # 1-based
    value: float


@dataclass
class AuctionOutcome:
    """Per-tenant result for one slice: total quota and the per-quota prices.

    ``auction_quotas``/``residual_quotas`` split the total into units won in
    the auction and units forced onto below-reserve bidders; ``prices`` lists
    auction prices first (in critical-price order), then residual entries.
    """

    quotas: dict[int, int] = field(default_factory=dict)
    prices: dict[int, list[float]] = field(default_factory=dict)
    auction_quotas: dict[int, int] = field(default_factory=dict)
    residual_quotas: dict[int, int] = field(default_factory=dict)

    def revenue(self) -> float:
        return sum(sum(ps) for ps in self.prices.values())


def build_increments(bid: Bid, epsilon: float) -> list[Increment]:
    """All marginal log-utility increments of one bidder, unit 1 first."""
    out = []
    prev = math.log(epsilon)
    for i in range(1, bid.demand + 1):
        cur = math.log(i + epsilon)
        out.append(Increment(bid.vsp_id, i, bid.amount * (cur - prev)))
        prev = cur
    return out


def _increment_rows(bids: list[Bid], epsilon: float) -> list[tuple[float, float, int, int]]:
    # (value, bid amount, vsp_id, unit_index) rows sorted descending by value;
    # ties by higher bid, then lower id, then lower unit.
    rows = []
    for b in bids:
        prev = math.log(epsilon)
        for i in range(1, b.demand + 1):
            cur = math.log(i + epsilon)
            rows.append((b.amount * (cur - prev), b.amount, b.vsp_id, i))
            prev = cur
    rows.sort(key=lambda r: (-r[0], -r[1], r[2], r[3]))
    return rows


def lif_allocate(offered: int, bids: list[Bid], reserve: float, epsilon: float) -> dict[int, int]:
    """Quotas per bidder under largest-increment-first; below-reserve bids get 0."""
    cleared = [b for b in bids if b.amount >= reserve]
    quotas = {b.vsp_id: 0 for b in bids}
    rows = _increment_rows(cleared, epsilon)
    for _, _, vid, _ in rows[: min(offered, len(rows))]:
        quotas[vid] += 1
    return quotas


def cprp_price(
    preserved: list[float], rival_losing: list[float], bid: float, reserve: float
) -> list[float]:
    """Critical prices for one winner's quotas, floored at the reserve.

    ``preserved`` holds the winner's granted increment values, ``rival_losing``
    the other bidders' non-granted increments. The i-th price pits the i-th
    smallest preserved increment against the i-th highest rival loser (0 when
    exhausted): the winner pays the bid level at which that unit would have
    lost. Once a critical price falls to the reserve, every remaining unit
    is priced at the reserve outright, since later ratios only shrink.
    """
    asc = sorted(preserved)
    losers = sorted(rival_losing, reverse=True)
    q = len(asc)
    prices: list[float] = []
    for i in range(1, q + 1):
        rival = losers[i - 1] if i - 1 < len(losers) else 0.0
        critical = bid * rival / asc[i - 1]
        if critical <= reserve:
            prices.extend([reserve] * (q - i + 1))
            break
        prices.append(critical)
    return prices


def run_slice_auction(
    offered: int, bids: list[Bid], reserve: float, epsilon: float
) -> AuctionOutcome:
    """Full auction for one slice: allocation, pricing, residual assignment."""
    cleared = [b for b in bids if b.amount >= reserve]
    screened = sorted((b for b in bids if b.amount < reserve), key=lambda b: b.vsp_id)

    outcome = AuctionOutcome(
        quotas={b.vsp_id: 0 for b in bids},
        prices={b.vsp_id: [] for b in bids},
        auction_quotas={b.vsp_id: 0 for b in bids},
        residual_quotas={b.vsp_id: 0 for b in bids},
    )

    if offered > 0 and len(cleared) == 1:
        # Competition-free: no rival increments exist, so every critical
        # price collapses to the reserve and the sort is unnecessary.
        b = cleared[0]
        won = min(offered, b.demand)
        outcome.auction_quotas[b.vsp_id] = won
        outcome.prices[b.vsp_id] = [reserve] * won
        take = won
    elif offered > 0 and cleared:
        rows = _increment_rows(cleared, epsilon)
        take = min(offered, len(rows))
        won, lost = rows[:take], rows[take:]
        per_vsp_values: dict[int, list[float]] = {}
        for value, _, vid, _ in won:
            outcome.auction_quotas[vid] += 1
            per_vsp_values.setdefault(vid, []).append(value)
        for b in cleared:
            q = outcome.auction_quotas[b.vsp_id]
            if q == 0:
                continue
            rival_losing = [value for value, _, vid, _ in lost if vid != b.vsp_id]
            outcome.prices[b.vsp_id] = cprp_price(
                per_vsp_values[b.vsp_id], rival_losing, b.amount, reserve
            )
    else:
        take = 0

    residual = offered - take
    if residual > 0 and screened:
        made_progress = True
        while residual > 0 and made_progress:
            made_progress = False
            for b in screened:
                if residual == 0:
                    break
                if outcome.residual_quotas[b.vsp_id] < b.demand:
                    outcome.residual_quotas[b.vsp_id] += 1
                    outcome.prices[b.vsp_id].append(reserve)
                    residual -= 1
                    made_progress = True

    for vid in outcome.quotas:
        outcome.quotas[vid] = outcome.auction_quotas[vid] + outcome.residual_quotas[vid]
    return outcome


def vwpfa_run(
    offered: dict[int, int],
    bids: dict[int, list[Bid]],
    reserves: dict[int, float],
    epsilon: float,
) -> dict[int, AuctionOutcome]:
    """Run the quota auction for every slice; keys are slice labels."""
    return {
        label: run_slice_auction(offered[label], bids.get(label, []), reserves[label], epsilon)
        for label in offered
    }


def bidder_utility(outcome: AuctionOutcome, vsp_id: int, true_value: float) -> float:
    """Mechanism utility: value of auction-won quotas minus their payments.

    Residual-forced quotas are excluded; they are a posted-price penalty
    outside the auction, not part of the bidding game.
    """
    won = outcome.auction_quotas.get(vsp_id, 0)
    paid = sum(outcome.prices.get(vsp_id, [])[:won])
    return true_value * won - paid
