"""Command-line front end.

``slicemarket run`` executes the experiment grid (strategy x arrival scale)
from a scenario file and writes metric CSVs plus ``summary.json``;
``slicemarket auction`` runs a one-shot quota auction from a bid file;
``slicemarket validate`` checks a scenario file. Exit codes: 0 ok, 1 config
error, 2 runtime invariant violation.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import sys
from pathlib import Path

import click

from .auction import Bid, run_slice_auction
from .engine import InvariantViolation
from .experiment import (
    STRATEGY_PAIRS,
    run_experiment,
    summarize_combo,
    write_result_csvs,
    write_summary,
)
from .model import ScenarioError, load_scenario, validate_scenario

CONFIG_ERROR = 1
RUNTIME_ERROR = 2


@click.group()
def main():
    """Slotted multi-provider slice-market simulator."""


def _load(config_path: str):
    try:
        return load_scenario(config_path)
    except ScenarioError as err:
        click.echo("scenario validation failed:", err=True)
        for v in err.violations:
            click.echo(f"  - {v}", err=True)
        sys.exit(CONFIG_ERROR)
    except (OSError, KeyError, TypeError, ValueError) as err:
        click.echo(f"cannot load scenario: {err}", err=True)
        sys.exit(CONFIG_ERROR)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--slots", type=int, default=None, help="Override the scenario horizon.")
@click.option("--repeats", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option(
    "--strategy",
    default="mpsac",
    show_default=True,
    help=f"Comma list of strategies for the benchmark NSP: {', '.join(STRATEGY_PAIRS)}.",
)
@click.option(
    "--lambda-scale",
    "lambda_scale",
    default=None,
    help="Comma list of arrival-scale values; defaults to the scenario's.",
)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def run(config_path, slots, repeats, seed, strategy, lambda_scale, out_dir):
    """Run every (strategy, arrival scale) combination and export CSVs."""
    scenario = _load(config_path)
    cfg = scenario.config
    if slots is not None:
        cfg = dataclasses.replace(cfg, horizon=slots)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    strategies = [s.strip() for s in strategy.split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGY_PAIRS:
            click.echo(f"unknown strategy {s!r}", err=True)
            sys.exit(CONFIG_ERROR)
    if lambda_scale is None:
        scales = [cfg.arrival_scale]
    else:
        try:
            scales = [float(x) for x in lambda_scale.split(",") if x.strip()]
        except ValueError:
            click.echo(f"bad --lambda-scale value {lambda_scale!r}", err=True)
            sys.exit(CONFIG_ERROR)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    flat = len(strategies) == 1 and len(scales) == 1
    combos = []
    for name in strategies:
        admission, intra = STRATEGY_PAIRS[name]
        for scale in scales:
            combo_cfg = dataclasses.replace(cfg, arrival_scale=scale)
            try:
                base = validate_scenario(combo_cfg)
                combo_scn = base.with_strategy(base.benchmark_nsp, admission, intra)
                result = run_experiment(combo_scn, repeats, combo_cfg.seed)
            except ScenarioError as err:
                click.echo(f"scenario error: {err}", err=True)
                sys.exit(CONFIG_ERROR)
            except InvariantViolation as err:
                click.echo(f"invariant violation: {err}", err=True)
                sys.exit(RUNTIME_ERROR)
            combo_dir = out if flat else out / f"{name}_g{scale:g}"
            write_result_csvs(result, combo_dir)
            combos.append(summarize_combo(result, name, combo_dir))
            click.echo(
                f"{name} @ scale {scale:g}: long-term base revenue "
                f"{combos[-1]['long_term']['base_revenue']:.4f} -> {combo_dir}"
            )
    meta = {
        "config": str(config_path),
        "slots": cfg.horizon,
        "repeats": repeats,
        "base_seed": cfg.seed,
    }
    write_summary(combos, meta, out / "summary.json")
    click.echo(f"summary -> {out / 'summary.json'}")


def _read_bid_file(path: str) -> list[Bid]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
            "vsp_id",
            "bid",
            "demand",
        ]:
            raise ValueError("bid file must have header: vsp_id,bid,demand")
        try:
            return [
                Bid(int(row["vsp_id"]), float(row["bid"]), int(row["demand"]))
                for row in reader
            ]
        except (KeyError, TypeError, ValueError) as err:
            raise ValueError(f"malformed bid row: {err}") from err


@main.command()
@click.argument("bid_file", type=click.Path(exists=True))
@click.option("--offered", type=int, required=True)
@click.option("--reserve", type=float, required=True)
@click.option("--epsilon", type=float, default=1.0, show_default=True)
def auction(bid_file, offered, reserve, epsilon):
    """One-shot quota auction over a CSV of bids (vsp_id,bid,demand)."""
    try:
        bids = _read_bid_file(bid_file)
    except ValueError as err:
        click.echo(str(err), err=True)
        sys.exit(CONFIG_ERROR)
    outcome = run_slice_auction(offered, bids, reserve, epsilon)
    click.echo(
        json.dumps(
            {
                "quotas": {str(v): q for v, q in sorted(outcome.quotas.items())},
                "prices": {str(v): p for v, p in sorted(outcome.prices.items())},
            },
            indent=2,
        )
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
def validate(config_path):
    """Validate a scenario file and print the derived tenant sets."""
    scenario = _load(config_path)
    click.echo(f"scenario ok: {len(scenario.nsps)} NSPs, {len(scenario.vsps)} VSPs")
    for label in scenario.slice_labels:
        tenants = ", ".join(str(v) for v in scenario.tenants[label])
        click.echo(f"  slice {label}: tenants {{{tenants}}}")


@main.command(hidden=True)
@click.argument("problem", type=click.Choice(["p3", "p4"]))
@click.argument("instance_file", type=click.Path(exists=True))
@click.option("--offered", type=int, default=0, help="p4 only")
@click.option("--reserve", type=float, default=0.0, help="p4 only")
@click.option("--epsilon", type=float, default=1.0, help="p4 only")
def oracle(problem, instance_file, offered, reserve, epsilon):
    """Debug access to the exact solvers (expensive; desk-scale only)."""
    import numpy as np

    from . import oracle as oracle_mod
    from .admission import AdmissionInput

    if problem == "p4":
        try:
            bids = _read_bid_file(instance_file)
        except ValueError as err:
            click.echo(str(err), err=True)
            sys.exit(CONFIG_ERROR)
        split, value = oracle_mod.exact_p4(offered, bids, reserve, epsilon)
        click.echo(json.dumps({"split": {str(v): q for v, q in sorted(split.items())},
                               "objective": value}, indent=2))
    else:
        raw = json.loads(Path(instance_file).read_text(encoding="utf-8"))
        inp = AdmissionInput(
            labels=tuple(range(len(raw["prices"]))),
            capacity=np.asarray(raw["capacity"], dtype=np.float64),
            demands=np.asarray(raw["demands"], dtype=np.float64),
            prices=np.asarray(raw["prices"], dtype=np.float64),
            active=np.asarray(raw.get("active", [0] * len(raw["prices"])), dtype=np.int64),
            requested=np.asarray(raw["requested"], dtype=np.int64),
            cum_accepted=np.zeros(len(raw["prices"]), dtype=np.int64),
            cum_received=np.zeros(len(raw["prices"]), dtype=np.int64),
        )
        quotas, value = oracle_mod.exact_p3(inp)
        click.echo(json.dumps({"quotas": quotas.tolist(), "objective": value}, indent=2))


if __name__ == "__main__":
    main()
