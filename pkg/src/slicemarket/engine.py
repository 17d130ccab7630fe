"""The slotted market loop.

Every slot runs a fixed phase order: (1) expire alive instances and reclaim
their resources, (2) drop reneged queue entries, (3) draw new subscriber
requests, who pick the shortest-queue VSP and may balk, (4) VSPs split their
queues across reachable providers using last slot's acceptance ratio and
fairness, (5) each provider makes its inter-slice then intra-slice decision,
(6) served requests leave queues FCFS and each granted instance draws a
lifetime and records its charged price, (7) metrics and cumulative counters
update. Reneging precedes arrivals so nobody reneges in their arrival slot;
decisions across providers are simultaneous (all see the same queues).

A run is a pure function of (scenario, seed): all randomness flows through
per-role, per-entity streams.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import agents
from .admission import RESOURCE_TOL, AdmissionInput, drredpa_decide
from .auction import Bid, run_slice_auction
from .baselines import (
    PreferenceMatrix,
    StaticPartition,
    load_proportional_partition,
    mqsac_decide,
    op_allocate,
    page_decide,
)
from .metrics import MetricSeries, acceptance_ratio, inter_slice_fairness, slot_vwpf
from .model import NspConfig, Scenario, SlotDecision, VspState
from .randomness import RunStreams, sample_exponential_slots, sample_exponential_slots_batch


class InvariantViolation(RuntimeError):
    """A hard model constraint broke mid-run; the run is aborted."""


class _NspRuntime:
    """Per-provider precompiled arrays plus mutable ledger state."""

    def __init__(self, cfg: NspConfig, scenario: Scenario):
        self.cfg = cfg
        self.labels = cfg.labels
        self.pos = {s: i for i, s in enumerate(self.labels)}
        self.capacity = np.array(list(cfg.capacity), dtype=np.float64)
        self.demands = np.array([list(s.demand) for s in cfg.slices], dtype=np.float64)
        self.prices = np.array([s.base_price for s in cfg.slices], dtype=np.float64)
        self.base_price = {s.label: s.base_price for s in cfg.slices}
        self.mean_lifetime = {s.label: s.mean_lifetime for s in cfg.slices}
        self.tenants = {
            s: tuple(v for v in scenario.tenants.get(s, ()) if cfg.id in scenario.vsps[v].reachable_nsps)
            for s in self.labels
        }
        if cfg.admission_strategy == "page":
            if cfg.page_fractions:
                self.partition = StaticPartition(dict(cfg.page_fractions))
            else:
                self.partition = load_proportional_partition(
                    self.labels, [s.arrival_rate for s in cfg.slices]
                )
        else:
            self.partition = None
        # Alive-instance ledger: label -> list of (expiry_slot, charged_price);
        # ``counts`` mirrors the list lengths to spare per-slot rebuilding.
        self.active: dict[int, list[tuple[int, float]]] = {s: [] for s in self.labels}
        self.counts = np.zeros(len(self.labels), dtype=np.int64)
        self.cum_accepted = np.zeros(len(self.labels), dtype=np.int64)
        self.cum_received = np.zeros(len(self.labels), dtype=np.int64)
        self._requested = np.zeros(len(self.labels), dtype=np.int64)
        self.series = MetricSeries(self.labels)


class SimulationRun:
    """One seeded run over the scenario horizon."""

    def __init__(
        self,
        scenario: Scenario,
        seed: int,
        matrices: dict[int, PreferenceMatrix] | None = None,
        check_invariants: bool = True,
    ):
        self.scenario = scenario
        self.seed = seed
        self.check = check_invariants
        self.streams = RunStreams(seed)
        self.t = 0
        cfg = scenario.config
        self.horizon = cfg.horizon
        self.alpha = cfg.alpha
        self.epsilon = cfg.epsilon
        self.nsps = {n.id: _NspRuntime(n, scenario) for n in cfg.nsps}
        self.vsp_states = {v.id: VspState() for v in cfg.vsps}
        self.matrices = matrices or {}
        for n in cfg.nsps:
            if n.admission_strategy == "mqsac" and n.id not in self.matrices:
                raise ValueError(f"NSP {n.id} uses the matrix strategy but got no matrix")
        # Attraction state fed to next slot's request splits.
        self.prev_ratio = {n.id: {s: 0.0 for s in n.labels} for n in cfg.nsps}
        self.prev_fairness = {n.id: 1.0 for n in cfg.nsps}
        # Arrival counts per label are decision-independent; draw them upfront.
        self._arrivals = {
            label: self.streams.arrivals(label).poisson_array(
                spec.arrival_rate * cfg.arrival_scale, cfg.horizon
            )
            for label, spec in sorted(scenario.market_slices.items())
        }
        self._bids = {
            v.id: (cfg.bid_overrides or {}).get(v.id, v.true_valuation) for v in cfg.vsps
        }

    # -- slot phases -------------------------------------------------------

    def _expire_instances(self):
        for rt in self.nsps.values():
            for i, s in enumerate(rt.labels):
                alive = rt.active[s]
                if alive:
                    survivors = [inst for inst in alive if inst[0] > self.t]
                    if len(survivors) != len(alive):
                        rt.active[s] = survivors
                        rt.counts[i] = len(survivors)

    def _spawn_arrivals(self):
        scenario = self.scenario
        for label in scenario.slice_labels:
            count = int(self._arrivals[label][self.t]) if label in self._arrivals else 0
            if count == 0:
                continue
            tenants = scenario.tenants[label]
            prefer_stream = self.streams.preferring(label)
            # Patience is drawn per arrival (even for balkers) so stream
            # consumption never depends on queue state.
            patience = sample_exponential_slots_batch(
                self.streams.patience(label),
                scenario.market_slices[label].mean_patience,
                count,
            )
            single = tenants[0] if len(tenants) == 1 else None
            for j in range(count):
                if single is None:
                    candidates = [(vid, len(self.vsp_states[vid].queue)) for vid in tenants]
                    chosen = agents.prefer_vsp(candidates, prefer_stream)
                else:
                    chosen = single
                queue = self.vsp_states[chosen].queue
                beta = scenario.vsps[chosen].wait_willingness
                if agents.balk_decision(len(queue), beta, self.streams.balking(chosen)):
                    queue.append((self.t, self.t + int(patience[j])))

    def _split_queues(self) -> dict[int, dict[int, int]]:
        """Per-VSP request counts sent to each reachable NSP this slot."""
        splits: dict[int, dict[int, int]] = {}
        for vid in sorted(self.vsp_states):
            vsp = self.scenario.vsps[vid]
            qlen = len(self.vsp_states[vid].queue)
            if self.scenario.config.split_mode == "uniform":
                split = agents.split_uniform(vsp, qlen)
            else:
                ratios = {n: self.prev_ratio[n][vsp.slice_label] for n in vsp.reachable_nsps}
                fairness = {n: self.prev_fairness[n] for n in vsp.reachable_nsps}
                split = agents.split_requests(vsp, qlen, ratios, fairness, self.alpha)
            splits[vid] = split.counts
        return splits

    def _decide(self, rt: _NspRuntime, splits: dict[int, dict[int, int]]) -> SlotDecision:
        nid = rt.cfg.id
        demand_by_vsp = {
            s: {v: splits[v].get(nid, 0) for v in rt.tenants[s]} for s in rt.labels
        }
        requested = rt._requested
        for i, s in enumerate(rt.labels):
            requested[i] = sum(demand_by_vsp[s].values())
        inp = AdmissionInput(
            labels=rt.labels,
            capacity=rt.capacity,
            demands=rt.demands,
            prices=rt.prices,
            active=rt.counts,
            requested=requested,
            cum_accepted=rt.cum_accepted,
            cum_received=rt.cum_received,
        )
        strategy = rt.cfg.admission_strategy
        if strategy == "drredpa":
            quotas = drredpa_decide(inp)
        elif strategy == "page":
            quotas = page_decide(inp, rt.partition)
        else:
            quotas = mqsac_decide(inp, self.matrices[rt.cfg.id])

        inter = {s: int(quotas[rt.pos[s]]) for s in rt.labels}
        intra: dict[int, dict[int, int]] = {}
        prices: dict[int, dict[int, list[float]]] = {}
        for s in rt.labels:
            demands = demand_by_vsp[s]
            if rt.cfg.intra_strategy == "vwpfa":
                bids = [Bid(v, self._bids[v], demands[v]) for v in rt.tenants[s]]
                outcome = run_slice_auction(inter[s], bids, rt.base_price[s], self.epsilon)
                intra[s] = outcome.quotas
                prices[s] = outcome.prices
            else:
                quotas_s = op_allocate(inter[s], demands)
                intra[s] = quotas_s
                prices[s] = {v: [rt.base_price[s]] * q for v, q in quotas_s.items()}
        return SlotDecision(inter=inter, intra=intra, prices=prices)

    def _settle(
        self,
        rt: _NspRuntime,
        decision: SlotDecision,
        splits: dict[int, dict[int, int]],
        served: dict[int, int],
    ):
        """Revenue, counters, instance ledger, and metric rows for one NSP."""
        base = 0.0
        actual = 0.0
        new_instances: dict[int, list[tuple[int, float]]] = {s: [] for s in rt.labels}
        lifetime_stream = self.streams.lifetimes(rt.cfg.id)
        for s in rt.labels:
            price_s = rt.base_price[s]
            for _, charged in rt.active[s]:
                base += price_s
                actual += charged
            for v in rt.tenants[s]:
                for charged in decision.prices[s].get(v, ()):
                    base += price_s
                    actual += charged
                    life = sample_exponential_slots(lifetime_stream, rt.mean_lifetime[s])
                    new_instances[s].append((self.t + life, charged))
                served[v] = served.get(v, 0) + decision.intra[s].get(v, 0)

        for i, s in enumerate(rt.labels):
            rt.cum_received[i] += sum(splits[v].get(rt.cfg.id, 0) for v in rt.tenants[s])
            rt.cum_accepted[i] += decision.inter[s]
            if new_instances[s]:
                rt.active[s].extend(new_instances[s])
                rt.counts[i] += len(new_instances[s])

        series = rt.series
        series.base_revenue.append(base)
        series.actual_revenue.append(actual)
        ratios = [
            acceptance_ratio(int(a), int(r))
            for a, r in zip(rt.cum_accepted, rt.cum_received)
        ]
        for s, r in zip(rt.labels, ratios):
            series.ratios[s].append(r)
        fair = inter_slice_fairness(ratios) if len(ratios) >= 2 else 1.0
        series.fairness.append(fair)
        for s in rt.labels:
            vals = {v: self.scenario.vsps[v].true_valuation for v in rt.tenants[s]}
            series.vwpf[s].append(slot_vwpf(decision.intra[s], vals, self.epsilon))
        self.prev_ratio[rt.cfg.id] = dict(zip(rt.labels, ratios))
        self.prev_fairness[rt.cfg.id] = fair

    def _assert_feasible(self, rt: _NspRuntime, decision: SlotDecision):
        used = rt.demands.T @ rt.counts
        if np.any(used > rt.capacity + RESOURCE_TOL):
            raise InvariantViolation(
                f"slot {self.t}: NSP {rt.cfg.id} usage {used} exceeds capacity {rt.capacity}"
            )
        for s in rt.labels:
            if sum(decision.intra[s].values()) != decision.inter[s]:
                raise InvariantViolation(
                    f"slot {self.t}: NSP {rt.cfg.id} slice {s} intra/inter quota mismatch"
                )
            for v, ps in decision.prices[s].items():
                if len(ps) != decision.intra[s].get(v, 0):
                    raise InvariantViolation(
                        f"slot {self.t}: NSP {rt.cfg.id} slice {s} price-list length mismatch"
                    )

    def step(self):
        if self.t >= self.horizon:
            raise RuntimeError("horizon reached")
        self._expire_instances()
        pre_purge = {vid: len(st.queue) for vid, st in self.vsp_states.items()}
        reneged = {
            vid: agents.purge_reneged(st, self.t) for vid, st in self.vsp_states.items()
        }
        pre_arrival = {vid: len(st.queue) for vid, st in self.vsp_states.items()}
        self._spawn_arrivals()
        entrants = {
            vid: len(st.queue) - pre_arrival[vid] for vid, st in self.vsp_states.items()
        }
        splits = self._split_queues()

        served: dict[int, int] = {}
        decisions: dict[int, SlotDecision] = {}
        for nid in sorted(self.nsps):
            rt = self.nsps[nid]
            start = time.perf_counter()
            decisions[nid] = self._decide(rt, splits)
            rt.series.decision_time.append(time.perf_counter() - start)
        for nid in sorted(self.nsps):
            self._settle(self.nsps[nid], decisions[nid], splits, served)

        for vid, st in self.vsp_states.items():
            n_served = served.get(vid, 0)
            if n_served > len(st.queue):
                raise InvariantViolation(
                    f"slot {self.t}: VSP {vid} granted more quotas than queued requests"
                )
            del st.queue[:n_served]  # FCFS: the oldest requests are served
            if self.check:
                expected = pre_purge[vid] - reneged[vid] + entrants[vid] - n_served
                if len(st.queue) != expected:
                    raise InvariantViolation(f"slot {self.t}: VSP {vid} queue count drifted")
                if any(a > b for (a, _), (b, _) in zip(st.queue, st.queue[1:])):
                    raise InvariantViolation(f"slot {self.t}: VSP {vid} queue out of order")
        if self.check:
            for nid in sorted(self.nsps):
                self._assert_feasible(self.nsps[nid], decisions[nid])
        self.t += 1

    def run(self) -> dict[int, MetricSeries]:
        while self.t < self.horizon:
            self.step()
        return {nid: rt.series for nid, rt in self.nsps.items()}


def simulate(
    scenario: Scenario,
    seed: int,
    matrices: dict[int, PreferenceMatrix] | None = None,
    check_invariants: bool = True,
) -> dict[int, MetricSeries]:
    """Run the full horizon once and return each NSP's metric series."""
    return SimulationRun(scenario, seed, matrices, check_invariants).run()


@dataclass
class Envelope:
    """Pointwise mean/min/max of one metric across repeated runs."""

    mean: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def of(cls, rows: list[np.ndarray]) -> "Envelope":
        stacked = np.vstack(rows) if rows else np.zeros((1, 0))
        return cls(
            mean=stacked.mean(axis=0), lo=stacked.min(axis=0), hi=stacked.max(axis=0)
        )
