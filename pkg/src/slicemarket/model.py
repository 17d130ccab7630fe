"""Domain types, scenario configuration, and validation for the slice market.

A scenario is a market of NSPs (providers with multidimensional capacity that
lease slice instances) and VSPs (tenants that each retail one slice type and
queue subscriber requests). Slice labels are arbitrary integers whose order
encodes priority: a larger label means a higher-priority slice.

Scenario files are YAML; see :func:`scenario_from_dict` for the schema.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import yaml

ADMISSION_STRATEGIES = ("drredpa", "page", "mqsac")
INTRA_STRATEGIES = ("vwpfa", "op")
SPLIT_MODES = ("attraction", "uniform")


class ScenarioError(ValueError):
    """Raised by :func:`validate_scenario`; carries every violation found."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class ResourceVector:
    """Nonnegative quantities over the K abstract resource dimensions."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def check(self, k: int | None = None) -> list[str]:
        problems = []
        if k is not None and len(self.values) != k:
            problems.append(f"dimension mismatch: expected {k} entries, got {len(self.values)}")
        if any(v < 0 for v in self.values):
            problems.append(f"negative resource quantity in {self.values}")
        if any(not math.isfinite(v) for v in self.values):
            problems.append(f"non-finite resource quantity in {self.values}")
        return problems


@dataclass(frozen=True)
class SliceSpec:
    """Per-instance demand, pricing, and request-process parameters of one slice type."""

    label: int
    demand: ResourceVector
    base_price: float
    arrival_rate: float  # requests per slot, before the scenario-wide scale factor
    mean_lifetime: float  # slots an admitted instance stays alive, on average
    mean_patience: float  # slots a queued request waits before reneging, on average

    def check(self, k: int | None = None) -> list[str]:
        problems = [f"slice {self.label}: {p}" for p in self.demand.check(k)]
        if self.base_price <= 0:
            problems.append(f"slice {self.label}: nonpositive base_price {self.base_price}")
        if self.arrival_rate < 0:
            problems.append(f"slice {self.label}: negative arrival_rate {self.arrival_rate}")
        if self.mean_lifetime <= 0:
            problems.append(f"slice {self.label}: nonpositive mean_lifetime {self.mean_lifetime}")
        if self.mean_patience <= 0:
            problems.append(f"slice {self.label}: nonpositive mean_patience {self.mean_patience}")
        if not any(v > 0 for v in self.demand):
            problems.append(f"slice {self.label}: demand vector has no positive entry")
        return problems


@dataclass(frozen=True)
class NspConfig:
    """One provider: capacity, supported slice catalog, and its decision strategies."""

    id: int
    capacity: ResourceVector
    slices: tuple[SliceSpec, ...]  # ascending label order
    admission_strategy: str = "drredpa"
    intra_strategy: str = "vwpfa"
    # PAGE-only: per-label capacity fractions; defaults to load-proportional.
    page_fractions: dict[int, float] | None = None

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(s.label for s in self.slices)

    def slice_spec(self, label: int) -> SliceSpec:
        for s in self.slices:
            if s.label == label:
                return s
        raise KeyError(label)


@dataclass(frozen=True)
class VspConfig:
    """One tenant: the slice type it retails, its private value, and its provider reach."""

    id: int
    slice_label: int
    true_valuation: float  # value per quota per slot
    reachable_nsps: tuple[int, ...]
    wait_willingness: float  # balking exponent; 0 means subscribers always queue


@dataclass(frozen=True)
class ScenarioConfig:
    """Full experiment description; a run is a pure function of this plus a seed."""

    nsps: tuple[NspConfig, ...]
    vsps: tuple[VspConfig, ...]
    alpha: float
    epsilon: float
    horizon: int
    seed: int
    arrival_scale: float = 1.0
    benchmark_nsp: int | None = None  # the NSP whose strategy experiments swap out
    mqsac_matrices: int = 100
    vwpf_slice: int | None = None  # slice whose log-utility series is exported
    split_mode: str = "attraction"
    # Mechanism-test hook: fixed bid per VSP id instead of the true valuation.
    bid_overrides: dict[int, float] | None = None


class Scenario:
    """A validated :class:`ScenarioConfig` plus derived lookups.

    Derived fields: the resource dimensionality ``k``, the market-wide slice
    catalog (arrival/lifetime/patience parameters shared by every provider of
    a label), and the tenant set per slice label.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.k = len(config.nsps[0].capacity)
        self.nsps = {n.id: n for n in config.nsps}
        self.vsps = {v.id: v for v in config.vsps}
        # Tenant set per label, ascending VSP id.
        self.tenants: dict[int, tuple[int, ...]] = {}
        for v in config.vsps:
            self.tenants.setdefault(v.slice_label, ())
            self.tenants[v.slice_label] += (v.id,)
        self.slice_labels = tuple(sorted(self.tenants))
        # Market-wide per-label parameters (validated consistent across NSPs).
        self.market_slices: dict[int, SliceSpec] = {}
        for n in config.nsps:
            for s in n.slices:
                self.market_slices.setdefault(s.label, s)
        bench = config.benchmark_nsp
        self.benchmark_nsp = bench if bench is not None else config.nsps[-1].id
        self.vwpf_slice = config.vwpf_slice if config.vwpf_slice is not None else self.slice_labels[0]

    def providers_of(self, label: int) -> tuple[int, ...]:
        return tuple(n.id for n in self.config.nsps if label in n.labels)

    def with_strategy(self, nsp_id: int, admission: str, intra: str) -> "Scenario":
        """Return a validated copy with one NSP's strategy pair replaced."""
        nsps = tuple(
            dataclasses.replace(n, admission_strategy=admission, intra_strategy=intra)
            if n.id == nsp_id
            else n
            for n in self.config.nsps
        )
        return validate_scenario(dataclasses.replace(self.config, nsps=nsps))


def scenario_violations(config: ScenarioConfig) -> list[str]:
    """Collect every constraint violation in ``config`` (empty list if valid)."""
    problems: list[str] = []
    if not config.nsps:
        return ["scenario has no NSPs"]
    k = len(config.nsps[0].capacity)

    seen_nsp_ids = set()
    for n in config.nsps:
        if n.id in seen_nsp_ids:
            problems.append(f"duplicate NSP id {n.id}")
        seen_nsp_ids.add(n.id)
        problems += [f"nsp {n.id}: {p}" for p in n.capacity.check(k)]
        if list(n.labels) != sorted(set(n.labels)):
            problems.append(f"nsp {n.id}: slice labels not strictly ascending")
        for s in n.slices:
            problems += [f"nsp {n.id}: {p}" for p in s.check(k)]
        if n.admission_strategy not in ADMISSION_STRATEGIES:
            problems.append(f"nsp {n.id}: unknown admission strategy {n.admission_strategy!r}")
        if n.intra_strategy not in INTRA_STRATEGIES:
            problems.append(f"nsp {n.id}: unknown intra strategy {n.intra_strategy!r}")
        if n.page_fractions is not None:
            if set(n.page_fractions) != set(n.labels):
                problems.append(f"nsp {n.id}: page_fractions labels do not match its slices")
            elif any(f < 0 for f in n.page_fractions.values()) or not math.isclose(
                sum(n.page_fractions.values()), 1.0, abs_tol=1e-9
            ):
                problems.append(f"nsp {n.id}: page_fractions must be nonnegative and sum to 1")

    # Every provider of a label must quote identical request-process parameters.
    by_label: dict[int, SliceSpec] = {}
    for n in config.nsps:
        for s in n.slices:
            ref = by_label.setdefault(s.label, s)
            if (s.arrival_rate, s.mean_lifetime, s.mean_patience) != (
                ref.arrival_rate,
                ref.mean_lifetime,
                ref.mean_patience,
            ):
                problems.append(
                    f"slice {s.label}: request-process parameters differ across NSPs"
                )

    nsp_ids = {n.id: n for n in config.nsps}
    seen_vsp_ids = set()
    for v in config.vsps:
        if v.id in seen_vsp_ids:
            problems.append(f"duplicate VSP id {v.id}")
        seen_vsp_ids.add(v.id)
        if not v.reachable_nsps:
            problems.append(f"vsp {v.id}: no reachable NSPs")
        if v.true_valuation <= 0:
            problems.append(f"vsp {v.id}: nonpositive valuation {v.true_valuation}")
        if not 0 <= v.wait_willingness <= 1:
            problems.append(f"vsp {v.id}: wait_willingness {v.wait_willingness} outside [0, 1]")
        for nid in v.reachable_nsps:
            if nid not in nsp_ids:
                problems.append(f"vsp {v.id}: unreachable NSP reference {nid}")
            elif v.slice_label not in nsp_ids[nid].labels:
                problems.append(f"vsp {v.id}: unsupported slice {v.slice_label} at NSP {nid}")

    if not 0 <= config.alpha <= 1:
        problems.append(f"alpha {config.alpha} outside [0, 1]")
    if config.epsilon <= 0:
        problems.append(f"nonpositive epsilon {config.epsilon}")
    if config.horizon < 0:
        problems.append(f"negative horizon {config.horizon}")
    if not -(2**63) <= config.seed < 2**63:
        problems.append("seed outside 64-bit range")
    if config.arrival_scale < 0:
        problems.append(f"negative arrival_scale {config.arrival_scale}")
    if config.mqsac_matrices < 1:
        problems.append(f"mqsac_matrices must be >= 1, got {config.mqsac_matrices}")
    if config.split_mode not in SPLIT_MODES:
        problems.append(f"unknown split_mode {config.split_mode!r}")
    if config.benchmark_nsp is not None and config.benchmark_nsp not in nsp_ids:
        problems.append(f"benchmark_nsp {config.benchmark_nsp} is not an NSP id")
    if config.vwpf_slice is not None and all(
        config.vwpf_slice not in n.labels for n in config.nsps
    ):
        problems.append(f"vwpf_slice {config.vwpf_slice} is not supported by any NSP")
    return problems


def validate_scenario(config: ScenarioConfig) -> Scenario:
    """Validate ``config`` and derive tenant sets; raises :class:`ScenarioError`."""
    problems = scenario_violations(config)
    if problems:
        raise ScenarioError(problems)
    return Scenario(config)


# --------------------------------------------------------------------------
# Runtime state containers (mutated only by the simulation engine).
# --------------------------------------------------------------------------


@dataclass
class NspState:
    """Ledger of one NSP's alive instances and cumulative request counters."""

    # Per label: list of [expiry_slot, charged_price]; an instance is alive
    # (and billed) for every slot strictly before its expiry slot.
    active: dict[int, list[tuple[int, float]]]
    cum_received: dict[int, int]
    cum_accepted: dict[int, int]

    @classmethod
    def fresh(cls, labels) -> "NspState":
        return cls(
            active={s: [] for s in labels},
            cum_received={s: 0 for s in labels},
            cum_accepted={s: 0 for s in labels},
        )

    def active_counts(self) -> dict[int, int]:
        return {s: len(lst) for s, lst in self.active.items()}


@dataclass
class VspState:
    """FCFS queue of pending subscriber requests for one VSP."""

    # (arrival_slot, deadline_slot); the entry reneges once the current slot
    # reaches its deadline. Kept in arrival order.
    queue: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.queue)


@dataclass
class SlotDecision:
    """One NSP's decision for one slot: slice quotas, tenant quotas, and prices."""

    inter: dict[int, int]  # label -> granted quota
    intra: dict[int, dict[int, int]]  # label -> vsp id -> quota
    prices: dict[int, dict[int, list[float]]]  # label -> vsp id -> per-quota prices


# --------------------------------------------------------------------------
# Scenario file format
# --------------------------------------------------------------------------


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from the YAML schema.

    Top-level keys: ``alpha``, ``epsilon``, ``horizon``, ``seed``,
    ``lambda_scale``, ``slices`` (label -> ``{lambda_G, lambda_L, lambda_W}``),
    ``nsps`` (list of ``{id, capacity, admission, intra, slices: {label:
    {demand, base_price}}, page_fractions?}``), ``vsps`` (list of ``{id,
    slice, valuation, nsps, beta}``), and optional ``benchmark_nsp``,
    ``mqsac_matrices``, ``vwpf_slice``, ``split_mode``, ``bid_overrides``.
    """
    market = {int(label): entry for label, entry in raw["slices"].items()}
    nsps = []
    for n in raw["nsps"]:
        specs = []
        for label in sorted(int(x) for x in n["slices"]):
            entry = n["slices"][label]
            m = market[label]
            specs.append(
                SliceSpec(
                    label=label,
                    demand=ResourceVector(tuple(entry["demand"])),
                    base_price=float(entry["base_price"]),
                    arrival_rate=float(m["lambda_G"]),
                    mean_lifetime=float(m["lambda_L"]),
                    mean_patience=float(m["lambda_W"]),
                )
            )
        fractions = n.get("page_fractions")
        nsps.append(
            NspConfig(
                id=int(n["id"]),
                capacity=ResourceVector(tuple(n["capacity"])),
                slices=tuple(specs),
                admission_strategy=n.get("admission", "drredpa"),
                intra_strategy=n.get("intra", "vwpfa"),
                page_fractions={int(k): float(v) for k, v in fractions.items()}
                if fractions
                else None,
            )
        )
    vsps = tuple(
        VspConfig(
            id=int(v["id"]),
            slice_label=int(v["slice"]),
            true_valuation=float(v["valuation"]),
            reachable_nsps=tuple(sorted(int(x) for x in v["nsps"])),
            wait_willingness=float(v["beta"]),
        )
        for v in raw["vsps"]
    )
    overrides = raw.get("bid_overrides")
    return ScenarioConfig(
        nsps=tuple(nsps),
        vsps=vsps,
        alpha=float(raw["alpha"]),
        epsilon=float(raw["epsilon"]),
        horizon=int(raw["horizon"]),
        seed=int(raw["seed"]),
        arrival_scale=float(raw.get("lambda_scale", 1.0)),
        benchmark_nsp=int(raw["benchmark_nsp"]) if "benchmark_nsp" in raw else None,
        mqsac_matrices=int(raw.get("mqsac_matrices", 100)),
        vwpf_slice=int(raw["vwpf_slice"]) if "vwpf_slice" in raw else None,
        split_mode=raw.get("split_mode", "attraction"),
        bid_overrides={int(k): float(v) for k, v in overrides.items()} if overrides else None,
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Inverse of :func:`scenario_from_dict` (round-trips exactly)."""
    market: dict[int, dict] = {}
    for n in config.nsps:
        for s in n.slices:
            market.setdefault(
                s.label,
                {
                    "lambda_G": s.arrival_rate,
                    "lambda_L": s.mean_lifetime,
                    "lambda_W": s.mean_patience,
                },
            )
    out = {
        "alpha": config.alpha,
        "epsilon": config.epsilon,
        "horizon": config.horizon,
        "seed": config.seed,
        "lambda_scale": config.arrival_scale,
        "mqsac_matrices": config.mqsac_matrices,
        "split_mode": config.split_mode,
        "slices": {label: market[label] for label in sorted(market)},
        "nsps": [
            {
                "id": n.id,
                "capacity": list(n.capacity),
                "admission": n.admission_strategy,
                "intra": n.intra_strategy,
                "slices": {
                    s.label: {"demand": list(s.demand), "base_price": s.base_price}
                    for s in n.slices
                },
                **(
                    {"page_fractions": dict(sorted(n.page_fractions.items()))}
                    if n.page_fractions
                    else {}
                ),
            }
            for n in config.nsps
        ],
        "vsps": [
            {
                "id": v.id,
                "slice": v.slice_label,
                "valuation": v.true_valuation,
                "nsps": list(v.reachable_nsps),
                "beta": v.wait_willingness,
            }
            for v in config.vsps
        ],
    }
    if config.benchmark_nsp is not None:
        out["benchmark_nsp"] = config.benchmark_nsp
    if config.vwpf_slice is not None:
        out["vwpf_slice"] = config.vwpf_slice
    if config.bid_overrides:
        out["bid_overrides"] = dict(sorted(config.bid_overrides.items()))
    return out


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return validate_scenario(scenario_from_dict(raw))


def dump_scenario(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(config), fh, sort_keys=False)
