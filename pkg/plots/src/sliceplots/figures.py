"""Figure rendering over the simulator's exported result files.

Consumes only the documented file formats: metric CSVs with columns
``slot,mean,min,max`` (one row per slot) and ``summary.json`` with a
``combos`` list carrying per-strategy ``timing.total_seconds_{mean,min,max}``
fields. Inputs are opened read-only and never modified.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg  # noqa: F401 (registers Agg)
from matplotlib.figure import Figure

SERIES_HEADER = ["slot", "mean", "min", "max"]


class SchemaError(ValueError):
    """An input file does not match the documented schema."""


def read_series_csv(path) -> dict[str, list[float]]:
    """Parse one metric CSV into slot/mean/min/max columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SERIES_HEADER:
            raise SchemaError(f"{path}: expected header {','.join(SERIES_HEADER)}")
        cols: dict[str, list[float]] = {name: [] for name in SERIES_HEADER}
        for row in reader:
            if len(row) != 4:
                raise SchemaError(f"{path}: malformed row {row!r}")
            for name, value in zip(SERIES_HEADER, row):
                cols[name].append(float(value))
    return cols


def build_series_figure(
    series: list[dict[str, list[float]]],
    labels: list[str],
    metric: str = "value",
    title: str | None = None,
) -> Figure:
    fig = Figure(figsize=(7, 4.2))
    ax = fig.subplots()
    for s, label in zip(series, labels):
        (line,) = ax.plot(s["slot"], s["mean"], label=label, linewidth=1.4)
        ax.fill_between(s["slot"], s["min"], s["max"], color=line.get_color(), alpha=0.2)
    ax.set_xlabel("slot")
    ax.set_ylabel(metric.replace("_", " "))
    if metric == "fairness":
        ax.set_ylim(0.0, 1.0)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return fig


def render_series(
    csv_paths: list,
    labels: list[str],
    out_image,
    metric: str = "value",
    title: str | None = None,
) -> Path:
    """One mean curve plus a min/max envelope band per input CSV.

    All CSVs must share the slot column. A ``fairness`` metric clamps the
    y-axis to [0, 1], its defined range.
    """
    if len(csv_paths) != len(labels):
        raise ValueError("need one label per CSV")
    if not csv_paths:
        raise ValueError("no input CSVs")
    series = [read_series_csv(p) for p in csv_paths]
    slots0 = series[0]["slot"]
    for p, s in zip(csv_paths, series):
        if s["slot"] != slots0:
            raise SchemaError(f"{p}: slot column differs from {csv_paths[0]}")
    fig = build_series_figure(series, labels, metric=metric, title=title)
    out = Path(out_image)
    fig.savefig(out, dpi=150)
    return out


def read_timing_stats(summary_path) -> list[dict]:
    """Per-combo timing rows from a summary file."""
    payload = json.loads(Path(summary_path).read_text(encoding="utf-8"))
    combos = payload.get("combos")
    if not isinstance(combos, list) or not combos:
        raise SchemaError(f"{summary_path}: no combos array")
    rows = []
    for combo in combos:
        timing = combo.get("timing", {})
        try:
            rows.append(
                {
                    "label": f"{combo['strategy']}@{combo.get('lambda_scale', '?'):g}",
                    "mean": float(timing["total_seconds_mean"]),
                    "min": float(timing["total_seconds_min"]),
                    "max": float(timing["total_seconds_max"]),
                }
            )
        except (KeyError, TypeError) as err:
            raise SchemaError(f"{summary_path}: missing timing fields ({err})") from err
    return rows


def build_timing_figure(rows: list[dict]) -> Figure:
    fig = Figure(figsize=(6.5, 4.0))
    ax = fig.subplots()
    xs = range(len(rows))
    means = [r["mean"] for r in rows]
    err_lo = [r["mean"] - r["min"] for r in rows]
    err_hi = [r["max"] - r["mean"] for r in rows]
    ax.bar(xs, means, yerr=[err_lo, err_hi], capsize=4, color="tab:blue", alpha=0.85)
    ax.set_xticks(list(xs), [r["label"] for r in rows], rotation=20, ha="right")
    ax.set_ylabel("decision time per run (s)")
    fig.tight_layout()
    return fig


def render_timing(summary_paths: list, out_image) -> Path:
    """Bar chart of mean decision wall-clock per strategy, min/max whiskers."""
    rows = [row for path in summary_paths for row in read_timing_stats(path)]
    fig = build_timing_figure(rows)
    out = Path(out_image)
    fig.savefig(out, dpi=150)
    return out
