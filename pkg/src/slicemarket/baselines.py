"""Comparison admission strategies.

* Static partitioning: each slice admits only against a fixed, exclusive
  fraction of total capacity (no borrowing), so contention never crosses
  slice boundaries but idle partitions go to waste.
* Preference-matrix admission: a coarse utilization bucket selects a slice
  order, and units are granted first-fit in that order until nothing fits.
* On-proportion intra-slice split: quotas divided across tenants
  proportionally to their demands, all at the base price.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admission import RESOURCE_TOL, AdmissionInput
from .agents import largest_remainder
from .kernels import active as _k
from .randomness import RngStream

UTILIZATION_BUCKETS = 10


@dataclass(frozen=True)
class StaticPartition:
    """Per-label capacity fractions; nonnegative and summing to 1."""

    fractions: dict[int, float]

    def __post_init__(self):
        if any(f < 0 for f in self.fractions.values()):
            raise ValueError("negative partition fraction")
        if abs(sum(self.fractions.values()) - 1.0) > 1e-9:
            raise ValueError("partition fractions must sum to 1")


@dataclass(frozen=True)
class PreferenceMatrix:
    """One slice-order permutation per utilization bucket.

    ``orders[b]`` lists slice positions (into the NSP's ascending label
    tuple) in the order admission is attempted when the remaining-capacity
    ratio falls in bucket ``b``.
    """

    orders: np.ndarray  # [UTILIZATION_BUCKETS, S] int64

    def __post_init__(self):
        want = set(range(self.orders.shape[1]))
        for row in self.orders:
            if set(int(x) for x in row) != want:
                raise ValueError("bucket order is not a permutation of the slices")


def load_proportional_partition(labels, arrival_rates) -> StaticPartition:
    """Default partition: fractions proportional to per-slice arrival rates."""
    total = sum(arrival_rates)
    return StaticPartition({s: r / total for s, r in zip(labels, arrival_rates)})


def page_decide(inp: AdmissionInput, partition: StaticPartition) -> np.ndarray:
    """Per-slice quotas under static exclusive partitions."""
    fractions = np.array([partition.fractions[s] for s in inp.labels], dtype=np.float64)
    return _k.partitioned_fill(
        inp.capacity, inp.demands, inp.active, inp.requested, fractions, RESOURCE_TOL
    )


def utilization_bucket(capacity, demands, active) -> int:
    """Decile of the worst-dimension remaining-capacity ratio."""
    avail = _k.availability(
        np.asarray(capacity, np.float64),
        np.asarray(demands, np.float64),
        np.asarray(active, np.int64),
    )
    ratio = 1.0
    for k in range(len(capacity)):
        if capacity[k] > 0:
            ratio = min(ratio, max(avail[k], 0.0) / capacity[k])
    return min(UTILIZATION_BUCKETS - 1, int(ratio * UTILIZATION_BUCKETS))


def mqsac_decide(inp: AdmissionInput, matrix: PreferenceMatrix) -> np.ndarray:
    """Per-slice quotas under the bucket-selected preference order."""
    bucket = utilization_bucket(inp.capacity, inp.demands, inp.active)
    order = matrix.orders[bucket]
    return _k.ordered_fill(
        inp.capacity, inp.demands, inp.active, inp.requested, order, RESOURCE_TOL
    )


def generate_preference_matrices(
    count: int, n_slices: int, stream: RngStream
) -> list[PreferenceMatrix]:
    """Uniformly random bucket permutations; deterministic under the seed."""
    if count < 1:
        raise ValueError("matrix count must be >= 1")
    out = []
    for _ in range(count):
        rows = np.stack(
            [stream.permutation(n_slices) for _ in range(UTILIZATION_BUCKETS)]
        ).astype(np.int64)
        out.append(PreferenceMatrix(rows))
    return out


def op_allocate(offered: int, demands: dict[int, int]) -> dict[int, int]:
    """Split a slice quota across tenants proportionally to their demands.

    Real shares are integerized by largest remainder (ties to the lower id)
    and capped by each tenant's demand; overflow from caps waterfalls to
    tenants with room, so the total stays min(offered, total demand).
    """
    ids = sorted(demands)
    total = sum(demands[v] for v in ids)
    if offered <= 0 or total == 0:
        return {v: 0 for v in ids}
    grant_total = min(offered, total)
    shares = [grant_total * demands[v] / total for v in ids]
    counts = largest_remainder(shares, grant_total)
    quotas = {v: min(c, demands[v]) for v, c in zip(ids, counts)}
    leftover = grant_total - sum(quotas.values())
    for v in ids:
        if leftover == 0:
            break
        room = demands[v] - quotas[v]
        if room > 0:
            extra = min(room, leftover)
            quotas[v] += extra
            leftover -= extra
    return quotas
