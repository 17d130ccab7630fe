"""Command-line front end: ``sliceplots series`` and ``sliceplots timing``."""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaError, render_series, render_timing


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sliceplots", description="Render slice-market result files into figures."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    series = sub.add_parser("series", help="mean curves with min/max envelopes")
    series.add_argument("csvs", nargs="+", help="metric CSVs (slot,mean,min,max)")
    series.add_argument("--label", action="append", default=[],
                        help="one legend label per CSV, in order")
    series.add_argument("--metric", default="value", help="y-axis name; 'fairness' clamps to [0,1]")
    series.add_argument("--title", default=None)
    series.add_argument("--out", required=True, help="output image path")

    timing = sub.add_parser("timing", help="decision-time bar chart from summary files")
    timing.add_argument("summaries", nargs="+", help="summary.json files")
    timing.add_argument("--out", required=True, help="output image path")

    args = parser.parse_args(argv)
    try:
        if args.command == "series":
            labels = args.label or [str(p) for p in args.csvs]
            out = render_series(args.csvs, labels, args.out, metric=args.metric,
                                title=args.title)
        else:
            out = render_timing(args.summaries, args.out)
    except (SchemaError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
