"""Plan a sweep, run it with repetitions and outlier rejection, report it.

Uses the simulated synthetic workload so the demo is instant and exactly
reproducible; swap the workload block for KMeansSpec or PiSpec to measure
real executions. Also demonstrates crash-resume: the results file is
written cell by cell, and a resumed sweep of a deterministic workload is
byte-identical to an uninterrupted one.
"""

import json
import tempfile
from pathlib import Path

from granscale import (
    ExperimentPlan,
    SyntheticSpec,
    run_plan,
    scalability_verdict,
    strong_scaling_csv,
    weak_scaling_tables,
)
from granscale.harness import resume

workdir = Path(tempfile.mkdtemp(prefix="granscale-demo-"))

strong = ExperimentPlan(
    workload=SyntheticSpec(compute_ms_per_worker=20, exchange_ms_per_worker=2,
                           iterations=1, simulate=True),
    mode="strong",
    worker_counts=(1, 2, 4, 8),
    base_problem_size=5,
    problem_sizes=(5, 10),
    repetitions=5,
    seed=42,
)
out = workdir / "strong.jsonl"
results = run_plan(strong, out_path=out)
print("strong-scaling sweep ->", out)
print(strong_scaling_csv(results))
print("verdict:", scalability_verdict(results))

weak = ExperimentPlan(
    workload=SyntheticSpec(compute_ms_per_worker=20, exchange_ms_per_worker=2,
                           iterations=1, simulate=True),
    mode="weak",
    worker_counts=(2, 4, 8),
    base_problem_size=10,
    repetitions=5,
    seed=42,
)
wres = run_plan(weak)
time_table, speedup_table = weak_scaling_tables(wres, fmt="table")
print("\nweak-scaling tables:")
print(time_table)
print(speedup_table)

# Crash-resume: truncate the results file after the first two cells and
# let the harness fill in the rest.
lines = out.read_text().splitlines(keepends=True)
interrupted = workdir / "interrupted.jsonl"
interrupted.write_text("".join(lines[:3]))
resume(interrupted)
print("resume reproduces the uninterrupted file byte for byte:",
      interrupted.read_bytes() == out.read_bytes())

# Plans are plain JSON, so the same sweep runs from the CLI:
plan_file = workdir / "plan.json"
plan_file.write_text(json.dumps(strong.to_dict(), indent=2))
print(f"\ntry it from the shell:\n  granscale run --plan {plan_file} "
      f"--out {workdir / 'cli.jsonl'}")
