"""The five evaluation quantities tracked per provider per slot.

* base revenue: base price of every alive instance plus newly granted quota;
* actual revenue: the admission-time charged price of the same instances;
* cumulative acceptance ratio per slice;
* inter-slice fairness: Jain's index over the gaps between adjacent-priority
  acceptance ratios, 0 when any gap is negative;
* value-weighted log utility of the intra-slice allocation per slice.

Plus per-slot decision wall time for the runtime comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def acceptance_ratio(cum_accepted: int, cum_received: int) -> float:
    """Accepted / received, with 0/0 defined as 0."""
    if cum_accepted > cum_received:
        raise ValueError(f"accepted {cum_accepted} exceeds received {cum_received}")
    if cum_received == 0:
        return 0.0
    return cum_accepted / cum_received


def inter_slice_fairness(ratios: list[float]) -> float:
    """Jain's index of adjacent acceptance-ratio gaps, in ascending priority.

    Any negative gap (a lower-priority slice outpacing a higher one) scores 0.
    All-zero gaps are the perfect-equality limit and score 1. Otherwise with
    m ratios the score is ``(sum g)^2 / ((m - 1) * sum g^2)`` over the m - 1
    gaps, which lies in (0, 1] and hits 1 only for equal gaps.
    """
    if len(ratios) < 2:
        raise ValueError("fairness needs at least two slices")
    gaps = [b - a for a, b in zip(ratios, ratios[1:])]
    if any(g < 0 for g in gaps):
        return 0.0
    sq = sum(g * g for g in gaps)
    if sq == 0:
        return 1.0
    total = sum(gaps)
    return total * total / (len(gaps) * sq)


def slot_vwpf(quotas: dict[int, int], valuations: dict[int, float], epsilon: float) -> float:
    """Value-weighted proportional-fairness score of one slice's allocation.

    ``sum_v b*_v * ln(quota_v + epsilon)`` over the slice's tenants; the
    epsilon keeps zero quotas finite (and contributes nothing at epsilon=1).
    """
    if epsilon <= 0:
        raise ValueError(f"nonpositive epsilon {epsilon}")
    return sum(valuations[v] * math.log(quotas.get(v, 0) + epsilon) for v in valuations)


def slot_actual_revenue(active_prices: list[float], new_prices: list[float]) -> float:
    """Charged income for one slot: every alive instance plus every new quota."""
    return sum(active_prices) + sum(new_prices)


@dataclass
class MetricSeries:
    """Per-slot metric trace for one NSP over a full run."""

    labels: tuple[int, ...]
    base_revenue: list[float] = field(default_factory=list)
    actual_revenue: list[float] = field(default_factory=list)
    fairness: list[float] = field(default_factory=list)
    ratios: dict[int, list[float]] = field(init=False)
    vwpf: dict[int, list[float]] = field(init=False)
    decision_time: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.ratios = {s: [] for s in self.labels}
        self.vwpf = {s: [] for s in self.labels}

    def __len__(self) -> int:
        return len(self.base_revenue)
