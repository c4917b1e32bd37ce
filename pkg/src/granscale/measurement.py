"""Span-based instrumentation for parallel runs.

A run handle is opened by the coordinating context, shared by the workers,
and closed once they have joined. Workers record the durations of their
compute regions as spans; everything outside spans (barriers, exchanges,
scheduling) falls into the overhead term by construction.

Span submission appends to a per-worker buffer, so recording never blocks
another worker and costs nothing inside a timed region (the caller times
the region itself and reports the finished duration).
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from .metrics import TimingBreakdown

INCOMPLETE_COVERAGE = "incomplete worker coverage"


@dataclass(frozen=True)
class Span:
    """One timed compute region on one worker."""

    worker_id: int
    duration: float
    phase_label: str

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"span duration must be >= 0, got {self.duration}")


@dataclass(frozen=True)
class RunRecord:
    """Immutable evidence of one completed instrumented run."""

    run_id: str
    workload_id: str
    workers: int
    problem_size: int
    seed: int
    wall_clock: float
    spans: tuple[Span, ...]
    iterations: int
    started_at: str
    flags: tuple[str, ...] = ()

    def to_json(self) -> str:
        return json.dumps(
            {
                "run_id": self.run_id,
                "workload_id": self.workload_id,
                "workers": self.workers,
                "problem_size": self.problem_size,
                "seed": self.seed,
                "wall_clock_s": self.wall_clock,
                "iterations": self.iterations,
                "started_at": self.started_at,
                "spans": [
                    {"worker": s.worker_id, "duration_s": s.duration, "phase": s.phase_label}
                    for s in self.spans
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        obj = json.loads(text)
        spans = tuple(
            Span(s["worker"], s["duration_s"], s["phase"]) for s in obj["spans"]
        )
        rec = cls(
            run_id=obj["run_id"],
            workload_id=obj["workload_id"],
            workers=obj["workers"],
            problem_size=obj["problem_size"],
            seed=obj["seed"],
            wall_clock=obj["wall_clock_s"],
            spans=spans,
            iterations=obj["iterations"],
            started_at=obj["started_at"],
        )
        return _flag_coverage(rec)


class RunHandle:
    """Active run accepting spans from its workers.

    record_span may be called concurrently from all workers; each worker
    appends to its own buffer (list.append is atomic under CPython), so
    submission is lossless and never serializes the workers.
    """

    def __init__(self, workload_id: str, workers: int, problem_size: int, seed: int):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        if problem_size < 1:
            raise ValueError(f"problem_size must be >= 1, got {problem_size}")
        self.workload_id = workload_id
        self.workers = workers
        self.problem_size = problem_size
        self.seed = seed
        self.iterations = 0
        self.run_id = uuid.uuid4().hex
        self.started_at = datetime.now(timezone.utc).isoformat()
        self._buffers: list[list[Span]] = [[] for _ in range(workers)]
        self._start = time.perf_counter()
        self._finished = False

    def record_span(self, worker_id: int, duration: float, phase_label: str) -> None:
        if self._finished:
            raise RuntimeError("run already finished")
        if not 0 <= worker_id < self.workers:
            raise ValueError(
                f"worker_id {worker_id} out of range for {self.workers} workers"
            )
        self._buffers[worker_id].append(Span(worker_id, duration, phase_label))

    @property
    def span_count(self) -> int:
        return sum(len(b) for b in self._buffers)

    def finish(self, wall_clock: Optional[float] = None) -> RunRecord:
        """Close the run and freeze its record.

        wall_clock overrides the monotonic measurement; workloads running in
        simulated time use it so their records are exactly reproducible.
        """
        if self._finished:
            raise RuntimeError("run already finished")
        self._finished = True
        if wall_clock is None:
            wall_clock = time.perf_counter() - self._start
        spans = tuple(s for buf in self._buffers for s in buf)
        rec = RunRecord(
            run_id=self.run_id,
            workload_id=self.workload_id,
            workers=self.workers,
            problem_size=self.problem_size,
            seed=self.seed,
            wall_clock=wall_clock,
            spans=spans,
            iterations=self.iterations,
            started_at=self.started_at,
        )
        return _flag_coverage(rec)


def _flag_coverage(rec: RunRecord) -> RunRecord:
    covered = {s.worker_id for s in rec.spans}
    if len(covered) < rec.workers and INCOMPLETE_COVERAGE not in rec.flags:
        return RunRecord(
            **{**rec.__dict__, "flags": rec.flags + (INCOMPLETE_COVERAGE,)}
        )
    return rec


def begin_run(workload_id: str, workers: int, problem_size: int, seed: int) -> RunHandle:
    """Open a run: starts the wall clock and returns the span-accepting handle."""
    return RunHandle(workload_id, workers, problem_size, seed)


def record_span(handle: RunHandle, worker_id: int, duration: float, phase_label: str) -> None:
    handle.record_span(worker_id, duration, phase_label)


def finish_run(handle: RunHandle, wall_clock: Optional[float] = None) -> RunRecord:
    return handle.finish(wall_clock)


def aggregate(record: RunRecord) -> TimingBreakdown:
    """Collapse a run record into (workers, wall_clock, total computation time)."""
    total_comp = sum(s.duration for s in record.spans)
    return TimingBreakdown(
        workers=record.workers,
        wall_clock=record.wall_clock,
        total_comp=total_comp,
    )
