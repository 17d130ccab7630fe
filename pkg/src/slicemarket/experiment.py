"""Repeated-run experiments, envelope aggregation, and result files.

An experiment runs one scenario ``repeats`` times with seeds ``base_seed +
i`` and aggregates each metric into a pointwise mean/min/max envelope. When
the provider under test uses the preference-matrix strategy, every repeat is
simulated once per generated matrix and the matrix results are averaged
first, so the strategy is benchmarked by its matrix-average performance.

File outputs per (strategy, arrival-scale) combination: one CSV per metric
with columns ``slot,mean,min,max`` (floats printed with 9 significant
digits), plus a shared ``summary.json`` of long-term averages and decision
wall-clock statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import generate_preference_matrices
from .engine import Envelope, simulate
from .model import Scenario
from .randomness import RunStreams

# Shorthand strategy names: (inter-slice admission, intra-slice allocation).
STRATEGY_PAIRS = {
    "mpsac": ("drredpa", "vwpfa"),
    "drredpa-op": ("drredpa", "op"),
    "page": ("page", "op"),
    "mqsac": ("mqsac", "op"),
}

METRIC_NAMES = ("base_revenue", "actual_revenue", "fairness", "vwpf", "timing")

# Externally reported long-term revenue gains for this admission pipeline,
# kept in the summary for context next to the measured gaps.
REFERENCE_GAINS_PCT = {
    "base_revenue": {"mqsac": 9.6, "dsara": 10.3, "page": 20.3},
    "actual_revenue": {"mqsac": 17.1, "dsara": 17.3, "page": 34.9},
}


@dataclass
class ExperimentResult:
    scenario: Scenario
    repeats: int
    base_seed: int
    # nsp id -> metric name -> envelope across repeats
    envelopes: dict[int, dict[str, Envelope]]
    # nsp id -> per-run total decision seconds, one entry per repeat
    decision_totals: dict[int, list[float]]

    def long_term(self, nsp_id: int) -> dict[str, float]:
        """Mean over slots of each mean series (equals the CSV column mean)."""
        env = self.envelopes[nsp_id]
        return {
            name: float(env[name].mean.mean()) if env[name].mean.size else 0.0
            for name in METRIC_NAMES
            if name != "timing"
        }

    def timing_stats(self, nsp_id: int) -> dict[str, float]:
        totals = self.decision_totals[nsp_id]
        return {
            "total_seconds_mean": float(np.mean(totals)),
            "total_seconds_min": float(np.min(totals)),
            "total_seconds_max": float(np.max(totals)),
        }


def _series_arrays(series, focal_slice: int) -> dict[str, np.ndarray]:
    vwpf = series.vwpf.get(focal_slice)
    if vwpf is None:
        vwpf = [0.0] * len(series)
    return {
        "base_revenue": np.asarray(series.base_revenue, dtype=np.float64),
        "actual_revenue": np.asarray(series.actual_revenue, dtype=np.float64),
        "fairness": np.asarray(series.fairness, dtype=np.float64),
        "vwpf": np.asarray(vwpf, dtype=np.float64),
        "timing": np.asarray(series.decision_time, dtype=np.float64),
    }


def run_experiment(
    scenario: Scenario, repeats: int, base_seed: int, check_invariants: bool = True
) -> ExperimentResult:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    cfg = scenario.config
    matrix_nsps = [n.id for n in cfg.nsps if n.admission_strategy == "mqsac"]
    matrix_sets = {}
    if matrix_nsps:
        streams = RunStreams(base_seed)
        for nid in matrix_nsps:
            matrix_sets[nid] = generate_preference_matrices(
                cfg.mqsac_matrices, len(scenario.nsps[nid].labels), streams.matrices(nid)
            )

    focal = scenario.vwpf_slice
    nsp_ids = sorted(scenario.nsps)
    rows: dict[int, dict[str, list[np.ndarray]]] = {
        nid: {name: [] for name in METRIC_NAMES} for nid in nsp_ids
    }
    decision_totals: dict[int, list[float]] = {nid: [] for nid in nsp_ids}

    for i in range(repeats):
        seed = base_seed + i
        if matrix_nsps:
            per_matrix = [
                simulate(
                    scenario,
                    seed,
                    {nid: matrix_sets[nid][m] for nid in matrix_nsps},
                    check_invariants,
                )
                for m in range(cfg.mqsac_matrices)
            ]
            for nid in nsp_ids:
                arrays = [_series_arrays(res[nid], focal) for res in per_matrix]
                for name in METRIC_NAMES:
                    rows[nid][name].append(
                        np.mean([a[name] for a in arrays], axis=0)
                    )
                decision_totals[nid].append(
                    float(np.mean([a["timing"].sum() for a in arrays]))
                )
        else:
            result = simulate(scenario, seed, None, check_invariants)
            for nid in nsp_ids:
                arrays = _series_arrays(result[nid], focal)
                for name in METRIC_NAMES:
                    rows[nid][name].append(arrays[name])
                decision_totals[nid].append(float(arrays["timing"].sum()))

    envelopes = {
        nid: {name: Envelope.of(rows[nid][name]) for name in METRIC_NAMES}
        for nid in nsp_ids
    }
    return ExperimentResult(scenario, repeats, base_seed, envelopes, decision_totals)


# --------------------------------------------------------------------------
# Result files
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_envelope_csv(env: Envelope, path: Path) -> None:
    lines = ["slot,mean,min,max"]
    for t in range(env.mean.size):
        lines.append(f"{t},{_fmt(env.mean[t])},{_fmt(env.lo[t])},{_fmt(env.hi[t])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_result_csvs(result: ExperimentResult, out_dir: Path) -> dict[str, str]:
    """One CSV per (NSP, metric); benchmark-NSP files get the bare names."""
    out_dir.mkdir(parents=True, exist_ok=True)
    bench = result.scenario.benchmark_nsp
    paths: dict[str, str] = {}
    for nid, env_by_name in result.envelopes.items():
        suffix = "" if nid == bench else f"_nsp{nid}"
        for name, env in env_by_name.items():
            fname = f"{name}{suffix}.csv"
            write_envelope_csv(env, out_dir / fname)
            paths[f"{name}{suffix}"] = str(out_dir / fname)
    return paths


def summarize_combo(result: ExperimentResult, strategy: str, out_dir: Path) -> dict:
    bench = result.scenario.benchmark_nsp
    return {
        "strategy": strategy,
        "lambda_scale": result.scenario.config.arrival_scale,
        "benchmark_nsp": bench,
        "out_dir": str(out_dir),
        "long_term": result.long_term(bench),
        "timing": result.timing_stats(bench),
    }


def write_summary(combos: list[dict], meta: dict, path: Path) -> None:
    payload = {
        **meta,
        "combos": combos,
        "reference_gains_pct": REFERENCE_GAINS_PCT,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
