"""Greedy inter-slice admission driven by dominant-resource revenue efficiency.

Per slot, the provider repeatedly grants one instance to the slice earning
the most revenue per unit of its dominant resource (the dimension exhausted
first if that slice monopolized what is left), subject to capacity, residual
demand, and a priority condition: cumulative acceptance ratios must be
nondecreasing in slice priority. While the condition holds, a grant is only
taken if it keeps holding; once violated, grants go only to the slices whose
ratio fell behind, until the condition recovers or they cannot absorb more.
The loop stops on the first pass that grants nothing.

The in-loop acceptance ratios fold the current slot's received requests into
the denominators and tentative grants into the numerators, so the checks see
exactly the ratios the slot will end with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import active as _k

# Demand/availability comparisons tolerate this much accumulated float error;
# decimal demand fractions are not exactly representable.
RESOURCE_TOL = 1e-9


@dataclass
class AdmissionInput:
    """Array view of one provider's decision state for a slot.

    All per-slice arrays are aligned with ``labels`` (ascending priority).
    Cumulative counters cover prior slots only; ``requested`` is this slot's.
    """

    labels: tuple[int, ...]
    capacity: np.ndarray  # [K] float64
    demands: np.ndarray  # [S, K] float64, one row per slice
    prices: np.ndarray  # [S] float64
    active: np.ndarray  # [S] int64 alive instances
    requested: np.ndarray  # [S] int64
    cum_accepted: np.ndarray  # [S] int64
    cum_received: np.ndarray  # [S] int64


def dominant_resource(demand, available) -> int:
    """Index of the resource exhausted first under monopolized use.

    Ties break to the smallest index; zero-demand dimensions are skipped.
    """
    d = np.asarray(demand, dtype=np.float64)
    a = np.asarray(available, dtype=np.float64)
    k = _k.dominant_index(d, a)
    if k < 0:
        raise ValueError("demand vector has no positive entry")
    return int(k)


def revenue_efficiency(base_price: float, demand, available) -> float:
    """Revenue earned per unit of the dominant resource."""
    d = np.asarray(demand, dtype=np.float64)
    return base_price / d[dominant_resource(d, available)]


def available_resources(capacity, active_counts, tentative_quotas, demands) -> np.ndarray:
    """Capacity minus the footprint of alive plus tentatively granted instances.

    A negative entry means the caller fed an infeasible state; that is a bug
    upstream, so it raises instead of clamping.
    """
    cap = np.asarray(capacity, dtype=np.float64)
    dem = np.asarray(demands, dtype=np.float64)
    counts = np.asarray(active_counts, dtype=np.int64) + np.asarray(
        tentative_quotas, dtype=np.int64
    )
    avail = _k.availability(cap, dem, counts)
    if np.any(avail < -RESOURCE_TOL):
        raise RuntimeError(f"availability went negative: {avail}")
    return avail


def priority_condition_holds(cum_accepted, cum_received) -> bool:
    """True when acceptance ratios are nondecreasing in priority order."""
    acc = np.asarray(cum_accepted, dtype=np.int64)
    rec = np.asarray(cum_received, dtype=np.int64)
    return bool(_k.priority_holds(acc, rec))


def drredpa_decide(inp: AdmissionInput) -> np.ndarray:
    """Per-slice quotas aligned with ``inp.labels``; always feasible."""
    return _k.drredpa(
        inp.capacity,
        inp.demands,
        inp.prices,
        inp.active,
        inp.requested,
        inp.cum_accepted,
        inp.cum_received,
        RESOURCE_TOL,
    )
