"""Synthetic workload with an analytically known compute/overhead ratio.

Each worker alternates a timed "busy" phase of compute_ms with an untimed
exchange phase of exchange_ms inside a barrier section, so the expected
granularity is exactly compute_ms / exchange_ms regardless of worker count.

Occupation is realized with monotonic sleeps rather than a spin loop: a
Python spin holds the GIL and would serialize the workers, destroying the
analytic construction the workload exists to provide. Sleeping workers
overlap freely, so the ratio holds even on a single core.

With simulate=True no threads run at all; spans and wall clock are the
exact nominal durations. That mode is the fully deterministic variant used
for resume/persistence equality checks and fast tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..measurement import RunHandle, RunRecord
from ._pool import run_workers


@dataclass(frozen=True)
class SyntheticSpec:
    compute_ms_per_worker: float
    exchange_ms_per_worker: float
    iterations: int = 1
    simulate: bool = False

    def __post_init__(self):
        if self.compute_ms_per_worker <= 0 or self.exchange_ms_per_worker <= 0:
            raise ValueError("compute and exchange durations must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _occupy(seconds: float) -> None:
    time.sleep(seconds)


def synthetic_run(spec: SyntheticSpec, workers: int, run_handle: RunHandle) -> RunRecord:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    compute_s = spec.compute_ms_per_worker / 1000.0
    exchange_s = spec.exchange_ms_per_worker / 1000.0

    if spec.simulate:
        for _ in range(spec.iterations):
            for w in range(workers):
                run_handle.record_span(w, compute_s, "busy")
        run_handle.iterations = spec.iterations
        return run_handle.finish(
            wall_clock=spec.iterations * (compute_s + exchange_s)
        )

    def body(w, barrier):
        for _ in range(spec.iterations):
            t0 = time.perf_counter()
            _occupy(compute_s)
            t1 = time.perf_counter()
            run_handle.record_span(w, t1 - t0, "busy")
            barrier.wait()
            _occupy(exchange_s)  # exchange section: untimed, lands in overhead
            barrier.wait()

    run_workers(workers, body)
    run_handle.iterations = spec.iterations
    return run_handle.finish()
