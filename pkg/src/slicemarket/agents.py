"""Rational subscriber behavior and the tenants' request-splitting rule.

Subscribers prefer the shortest queue among the VSPs selling their service,
balk with probability 1 - exp(-beta * queue_length), and renege once their
patience deadline passes. A VSP with several reachable providers splits its
queued requests between them by a softmax attraction over each provider's
last-known acceptance ratio and inter-slice fairness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import VspConfig, VspState
from .randomness import RngStream


@dataclass(frozen=True)
class SubscriberRequest:
    slice_label: int
    arrival_slot: int
    patience_slots: int  # >= 1


@dataclass(frozen=True)
class RequestSplit:
    """Integer request counts per reachable NSP; sums to the queue length."""

    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())


def prefer_vsp(candidates: list[tuple[int, int]], stream: RngStream) -> int:
    """Pick the VSP with the shortest queue, uniformly at random among ties."""
    if not candidates:
        raise ValueError("no candidate VSPs")
    shortest = min(q for _, q in candidates)
    tied = [vid for vid, q in candidates if q == shortest]
    if len(tied) == 1:
        return tied[0]
    return tied[stream.choice_index(len(tied))]


def balk_decision(queue_length: int, beta: float, stream: RngStream) -> bool:
    """True when the subscriber joins the queue: probability exp(-beta * length)."""
    p = math.exp(-beta * queue_length)
    return stream.uniform() < p


def purge_reneged(state: VspState, current_slot: int) -> int:
    """Drop every queued request whose patience deadline has passed.

    Survivors keep their FCFS order. Returns the number removed.
    """
    before = len(state.queue)
    state.queue = [entry for entry in state.queue if entry[1] > current_slot]
    return before - len(state.queue)


def largest_remainder(shares: list[float], total: int) -> list[int]:
    """Apportion ``total`` units to real-valued ``shares`` (which sum to it).

    Floors everything, then hands the leftover units to the largest
    fractional parts; ties go to the lower index. Deterministic.
    """
    floors = [math.floor(s) for s in shares]
    leftover = total - sum(floors)
    if leftover > 0:
        order = sorted(range(len(shares)), key=lambda i: (-(shares[i] - floors[i]), i))
        for i in order[:leftover]:
            floors[i] += 1
    return floors


def attraction_shares(
    nsps: list[int],
    last_ratios: dict[int, float],
    last_fairness: dict[int, float],
    alpha: float,
) -> list[float]:
    """Each provider's share of a tenant's requests, before integerizing.

    ``alpha * softmax(ratio) + (1 - alpha) * softmax(fairness)`` over the
    reachable set; the shares sum to 1 and grow with either attraction term.
    """
    exp_r = [math.exp(last_ratios[n]) for n in nsps]
    exp_f = [math.exp(last_fairness[n]) for n in nsps]
    sum_r, sum_f = sum(exp_r), sum(exp_f)
    return [
        alpha * er / sum_r + (1.0 - alpha) * ef / sum_f
        for er, ef in zip(exp_r, exp_f)
    ]


def split_requests(
    vsp: VspConfig,
    queue_length: int,
    last_ratios: dict[int, float],
    last_fairness: dict[int, float],
    alpha: float,
) -> RequestSplit:
    """Split a queue across reachable NSPs by the acceptance/fairness attraction.

    Real-valued shares from :func:`attraction_shares` times the queue length
    are integerized by largest remainder, so the counts sum to the queue
    length exactly. A single reachable NSP receives everything.
    """
    nsps = list(vsp.reachable_nsps)
    if len(nsps) == 1:
        return RequestSplit({nsps[0]: queue_length})
    shares = [
        s * queue_length for s in attraction_shares(nsps, last_ratios, last_fairness, alpha)
    ]
    counts = largest_remainder(shares, queue_length)
    return RequestSplit(dict(zip(nsps, counts)))


def split_uniform(vsp: VspConfig, queue_length: int) -> RequestSplit:
    """Attraction-free split: equal real shares, largest-remainder integerized."""
    nsps = list(vsp.reachable_nsps)
    shares = [queue_length / len(nsps)] * len(nsps)
    return RequestSplit(dict(zip(nsps, largest_remainder(shares, queue_length))))
