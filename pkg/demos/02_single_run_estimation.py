"""Estimate speedup from ONE instrumented parallel run.

The point of the granularity estimator: no serial baseline is needed.
We run a synthetic workload whose compute/exchange ratio we control, so the
right answer is known in advance, and show how the run decomposes into
computation (spans) and overhead (everything else), and what efficiency and
speedup that implies.
"""

from granscale import (
    PiSpec,
    SyntheticSpec,
    aggregate,
    begin_run,
    granularity_metrics,
    monte_carlo_pi,
    synthetic_run,
)

WORKERS = 4

# 90 ms of compute and 10 ms of exchange per iteration per worker:
# granularity should come out near 90/10 = 9, efficiency near 0.9.
spec = SyntheticSpec(compute_ms_per_worker=90, exchange_ms_per_worker=10, iterations=10)
handle = begin_run("synthetic", workers=WORKERS, problem_size=10, seed=0)
record = synthetic_run(spec, WORKERS, handle)
breakdown = aggregate(record)
m = granularity_metrics(breakdown)

print(f"workers            : {breakdown.workers}")
print(f"wall clock         : {breakdown.wall_clock:.3f} s")
print(f"total computation  : {breakdown.total_comp:.3f} s  ({len(record.spans)} spans)")
print(f"overhead           : {m.overhead:.3f} s   (= p*wall - computation)")
print(f"granularity        : {m.granularity:.2f}      (expected ~9.0)")
print(f"efficiency         : {m.efficiency:.3f}     (expected ~0.9)")
print(f"estimated speedup  : {m.estimated_speedup:.2f}      (expected ~3.6 of {WORKERS})")

print("\nSame estimator on a real workload (Monte Carlo pi):")
pi_spec = PiSpec(n_samples=2_000_000, seed=42)
handle = begin_run("pi", workers=WORKERS, problem_size=pi_spec.n_samples, seed=42)
estimate, record = monte_carlo_pi(pi_spec, WORKERS, handle)
m = granularity_metrics(aggregate(record))
print(f"pi estimate        : {estimate:.6f}")
print(f"estimated speedup  : {m.estimated_speedup:.2f} of {WORKERS} "
      f"(efficiency {m.efficiency:.3f})")
print("\nOn a machine with fewer cores than workers the estimate reflects the")
print("time-shared execution, not ideal hardware; compare against a measured")
print("baseline with the sweep harness (see 03_sweep_and_report.py).")
