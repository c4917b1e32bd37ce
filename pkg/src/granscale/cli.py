"""Command-line interface.

Subcommands:
  granscale run --plan plan.json --out results.jsonl [--resume] [--pin-cores]
  granscale report --in results.jsonl --format csv|table|json --out <path>
  granscale validate-fixture

`run` exits 0 on full completion and 2 when the sweep stopped partway with
a failure (the results file keeps every completed cell).
`validate-fixture` prints the deviation table and exits 0/1 on pass/fail.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import fixture, harness, report


def _cmd_run(args) -> int:
    plan = harness.ExperimentPlan.from_dict(json.loads(Path(args.plan).read_text()))
    try:
        results = harness.run_plan(
            plan, out_path=args.out, resume=args.resume, pin_cores=args.pin_cores
        )
    except harness.CellExecutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"completed {len(results.cells)} cells -> {args.out}")
    return 0


def _cmd_report(args) -> int:
    results = harness.load_results(args.infile)
    if args.format == "json":
        rows = report.report_rows(results)
        text = json.dumps(
            [
                {
                    "workers": r.workers,
                    "problem_size": r.problem_size,
                    "mean_wall": r.mean_wall,
                    "granularity": r.granularity,
                    "efficiency": r.efficiency,
                    "estimated_speedup": r.estimated_speedup,
                    "actual_speedup": r.actual_speedup,
                    "relative_error": r.relative_error,
                    "anomaly_flags": sorted(r.anomaly_flags),
                }
                for r in rows
            ],
            indent=2,
        ) + "\n"
    elif results.mode == "strong":
        if args.format == "table":
            print("aligned tables are produced for weak-mode results; "
                  "emitting CSV for this strong-mode sweep", file=sys.stderr)
        text = report.strong_scaling_csv(results)
    else:
        time_table, speedup_table = report.weak_scaling_tables(results, fmt=args.format)
        text = time_table + "\n" + speedup_table
    text += "\n" + report.scalability_verdict(results) + "\n" if args.verdict else ""
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate_fixture(_args) -> int:
    validation = fixture.validate_fixture()
    print(validation.report_text())
    return 0 if validation.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="granscale",
        description="Estimate parallel speedup and scalability from instrumented runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment plan")
    p_run.add_argument("--plan", required=True, help="plan JSON file")
    p_run.add_argument("--out", required=True, help="results JSONL output path")
    p_run.add_argument("--resume", action="store_true", help="skip cells already in --out")
    p_run.add_argument("--pin-cores", action="store_true",
                       help="pin the process to the first max-workers CPUs (best effort)")
    p_run.set_defaults(func=_cmd_run)

    p_rep = sub.add_parser("report", help="render results")
    p_rep.add_argument("--in", dest="infile", required=True, help="results JSONL file")
    p_rep.add_argument("--format", choices=["csv", "table", "json"], default="csv")
    p_rep.add_argument("--out", help="output path (default: stdout)")
    p_rep.add_argument("--verdict", action="store_true", help="append the scalability verdict")
    p_rep.set_defaults(func=_cmd_report)

    p_val = sub.add_parser("validate-fixture", help="check the embedded published tables")
    p_val.set_defaults(func=_cmd_validate_fixture)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
