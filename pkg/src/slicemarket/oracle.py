"""Brute-force exact solvers for desk-scale verification.

These enumerate every feasible integer decision, so they are exponential and
guarded by hard instance-size limits: an oracle that silently truncates is
no oracle. They exist for the test suite (and a hidden CLI subcommand), not
for the production decision path.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .admission import RESOURCE_TOL, AdmissionInput
from .auction import Bid

MAX_ENUMERATION = 10**6


class InstanceTooLarge(ValueError):
    pass


def exact_p3(inp: AdmissionInput) -> tuple[np.ndarray, float]:
    """Optimal per-slice quotas for one slot's inter-slice problem.

    Maximizes base revenue over integer quota vectors within residual demand
    and multidimensional capacity (the soft priority condition is not
    enforced; the greedy may sacrifice revenue for it, the optimum may not).
    Ties prefer the lexicographically largest vector in descending priority.
    """
    bounds = [int(r) + 1 for r in inp.requested]
    size = math.prod(bounds)
    if size > MAX_ENUMERATION:
        raise InstanceTooLarge(f"{size} candidate vectors exceed {MAX_ENUMERATION}")
    residual = inp.capacity - inp.demands.T @ inp.active
    best: tuple[float, tuple[int, ...]] | None = None
    for combo in itertools.product(*(range(b) for b in bounds)):
        counts = np.array(combo, dtype=np.float64)
        used = inp.demands.T @ counts
        if np.any(used > residual + RESOURCE_TOL):
            continue
        value = float(inp.prices @ counts)
        key = (value, tuple(reversed(combo)))
        if best is None or key > best:
            best = key
    assert best is not None  # the zero vector is always feasible
    value, rev_combo = best
    return np.array(tuple(reversed(rev_combo)), dtype=np.int64), value


def p4_objective(quotas: dict[int, int], bids: list[Bid], epsilon: float) -> float:
    """Value-weighted log utility of an intra-slice split (all bidders)."""
    return sum(b.amount * math.log(quotas.get(b.vsp_id, 0) + epsilon) for b in bids)


def exact_p4(
    offered: int, bids: list[Bid], reserve: float, epsilon: float
) -> tuple[dict[int, int], float]:
    """Optimal intra-slice split of a slice quota among reserve-clearing bidders.

    Below-reserve bidders are pinned to zero. The split total is
    ``min(offered, cleared demand)``: the attainable amount, matching what any
    allocation rule can hand out. Enumerates every split; errors when there
    are too many.
    """
    cleared = [b for b in bids if b.amount >= reserve]
    size = math.prod(b.demand + 1 for b in cleared) if cleared else 1
    if size > MAX_ENUMERATION:
        raise InstanceTooLarge(f"{size} candidate splits exceed {MAX_ENUMERATION}")
    total = min(offered, sum(b.demand for b in cleared))
    best: tuple[float, dict[int, int]] | None = None
    for combo in itertools.product(*(range(b.demand + 1) for b in cleared)):
        if sum(combo) != total:
            continue
        quotas = {b.vsp_id: q for b, q in zip(cleared, combo)}
        value = p4_objective(quotas, bids, epsilon)
        if best is None or value > best[0]:
            best = (value, quotas)
    assert best is not None
    value, quotas = best
    full = {b.vsp_id: quotas.get(b.vsp_id, 0) for b in bids}
    return full, value
