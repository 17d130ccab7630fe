"""Seeded random streams for every stochastic role in the simulation.

Each role (arrivals, lifetimes, patience, balking, preferring, preference
matrices) draws from its own PCG64 stream keyed by ``(seed, stream_id)``, so
consuming one stream never perturbs another. Roles that belong to an entity
(a slice label, a VSP, an NSP) get one stream per entity: an NSP's admissions
then never shift the draws seen by the rest of the market, which keeps
providers statistically isolated on identical seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Role bases for stream ids; the entity id is added to the base.
ARRIVALS = 1 << 20
LIFETIMES = 2 << 20
PATIENCE = 3 << 20
BALKING = 4 << 20
PREFERRING = 5 << 20
MATRICES = 6 << 20


@dataclass
class RngStream:
    """One reproducible random stream: identical (seed, stream_id) pairs
    yield identical sample sequences across runs and platforms."""

    seed: int
    stream_id: int
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def uniform(self) -> float:
        return float(self._gen.random())

    def choice_index(self, n: int) -> int:
        return int(self._gen.integers(n))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def poisson_array(self, rate: float, size: int) -> np.ndarray:
        if rate < 0:
            raise ValueError(f"negative Poisson rate {rate}")
        return self._gen.poisson(rate, size=size)


def sample_poisson(stream: RngStream, rate: float) -> int:
    """Poisson-distributed request count for one slot; rate 0 yields 0."""
    if rate < 0:
        raise ValueError(f"negative Poisson rate {rate}")
    if rate == 0:
        return 0
    return int(stream._gen.poisson(rate))


def sample_exponential_slots(stream: RngStream, mean: float) -> int:
    """Exponential duration with the given mean, ceiled to whole slots (>= 1).

    The slotted model has no sub-slot durations, so a continuous draw is
    rounded up: anything admitted or queued lasts at least one slot.
    """
    if mean <= 0:
        raise ValueError(f"nonpositive Exponential mean {mean}")
    draw = float(stream._gen.exponential(mean))
    return max(1, math.ceil(draw))


def sample_exponential_slots_batch(stream: RngStream, mean: float, count: int) -> np.ndarray:
    """Vectorized :func:`sample_exponential_slots` for one slot's arrivals."""
    if mean <= 0:
        raise ValueError(f"nonpositive Exponential mean {mean}")
    draws = stream._gen.exponential(mean, size=count)
    return np.maximum(np.ceil(draws), 1.0).astype(np.int64)


@dataclass
class RunStreams:
    """All streams used by one simulation run, keyed per role and entity."""

    seed: int
    _cache: dict[int, RngStream] = field(default_factory=dict)

    def _get(self, stream_id: int) -> RngStream:
        st = self._cache.get(stream_id)
        if st is None:
            st = self._cache[stream_id] = RngStream(self.seed, stream_id)
        return st

    def arrivals(self, label: int) -> RngStream:
        return self._get(ARRIVALS + label)

    def lifetimes(self, nsp_id: int) -> RngStream:
        return self._get(LIFETIMES + nsp_id)

    def patience(self, label: int) -> RngStream:
        return self._get(PATIENCE + label)

    def balking(self, vsp_id: int) -> RngStream:
        return self._get(BALKING + vsp_id)

    def preferring(self, label: int) -> RngStream:
        return self._get(PREFERRING + label)

    def matrices(self, nsp_id: int) -> RngStream:
        return self._get(MATRICES + nsp_id)
