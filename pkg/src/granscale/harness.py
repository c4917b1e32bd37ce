"""Experiment planner and runner.

Expands a strong- or weak-scaling plan into (workers, problem_size) cells,
executes each cell serially (never two at once) with one untimed warm-up
run plus the configured repetitions, applies outlier rejection to the
wall-clock series (runs are kept or dropped atomically), derives the
granularity metrics from the mean timing breakdown, and persists one result
line per cell so an interrupted sweep can resume.

The serial baseline is measured with the same parallel code at one worker
under the identical protocol; a plan cell at workers=1 doubles as the
baseline for its problem size.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import stats
from .measurement import RunRecord, aggregate, begin_run
from .metrics import GranularityMetrics, TimingBreakdown, granularity_metrics, relative_error
from .workloads import (
    KMeansSpec,
    PiSpec,
    SyntheticSpec,
    generate_dataset,
    kmeans_parallel,
    monte_carlo_pi,
    synthetic_run,
)

log = logging.getLogger("granscale")

TOOL_VERSION = "0.1.0"

#: Extra repetition rounds allowed when refilling rejected measurements.
MAX_REFILL_ATTEMPTS = 3

SEED_ENV_VAR = "GRANSCALE_SEED"

WorkloadSpec = Union[KMeansSpec, PiSpec, SyntheticSpec]

_WORKLOAD_KINDS = {KMeansSpec: "kmeans", PiSpec: "pi", SyntheticSpec: "synthetic"}
_KIND_CLASSES = {v: k for k, v in _WORKLOAD_KINDS.items()}


class CellExecutionError(RuntimeError):
    """A workload failed inside one cell; carries the cell identity."""

    def __init__(self, cell_key, cause):
        super().__init__(f"cell {cell_key} failed: {cause}")
        self.cell_key = cell_key
        self.__cause__ = cause


@dataclass(frozen=True)
class ExperimentPlan:
    workload: WorkloadSpec
    mode: str  # "strong" | "weak"
    worker_counts: tuple[int, ...]
    base_problem_size: int
    problem_sizes: Optional[tuple[int, ...]] = None
    repetitions: int = 10
    measure_serial_baseline: bool = True
    seed: int = 0
    rerun_outliers: bool = True
    outlier_side: str = "both"

    def __post_init__(self):
        if self.mode not in ("strong", "weak"):
            raise ValueError(f"mode must be 'strong' or 'weak', got {self.mode}")
        if not self.worker_counts:
            raise ValueError("worker_counts must be nonempty")
        if list(self.worker_counts) != sorted(set(self.worker_counts)):
            raise ValueError("worker_counts must be strictly ascending")
        if any(p < 1 for p in self.worker_counts):
            raise ValueError("worker counts must be positive")
        if self.base_problem_size < 1:
            raise ValueError("base_problem_size must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.outlier_side not in ("both", "upper"):
            raise ValueError("outlier_side must be 'both' or 'upper'")
        object.__setattr__(self, "worker_counts", tuple(self.worker_counts))
        if self.problem_sizes is not None:
            object.__setattr__(self, "problem_sizes", tuple(self.problem_sizes))

    @property
    def workload_id(self) -> str:
        return _WORKLOAD_KINDS[type(self.workload)]

    def to_dict(self) -> dict:
        wl = {"kind": self.workload_id, **dataclasses.asdict(self.workload)}
        return {
            "workload": wl,
            "mode": self.mode,
            "worker_counts": list(self.worker_counts),
            "base_problem_size": self.base_problem_size,
            "problem_sizes": list(self.problem_sizes) if self.problem_sizes else None,
            "repetitions": self.repetitions,
            "measure_serial_baseline": self.measure_serial_baseline,
            "seed": self.seed,
            "rerun_outliers": self.rerun_outliers,
            "outlier_side": self.outlier_side,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentPlan":
        wl = dict(obj["workload"])
        kind = wl.pop("kind")
        if kind not in _KIND_CLASSES:
            raise ValueError(f"unknown workload kind {kind!r}")
        workload = _KIND_CLASSES[kind](**wl)
        sizes = obj.get("problem_sizes")
        return cls(
            workload=workload,
            mode=obj["mode"],
            worker_counts=tuple(obj["worker_counts"]),
            base_problem_size=obj["base_problem_size"],
            problem_sizes=tuple(sizes) if sizes else None,
            repetitions=obj.get("repetitions", 10),
            measure_serial_baseline=obj.get("measure_serial_baseline", True),
            seed=obj.get("seed", 0),
            rerun_outliers=obj.get("rerun_outliers", True),
            outlier_side=obj.get("outlier_side", "both"),
        )


def plan_hash(plan: ExperimentPlan) -> str:
    canonical = json.dumps(plan.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def plan_cells(plan: ExperimentPlan) -> list[tuple[int, int]]:
    """Expand a plan into (workers, problem_size) cells in execution order."""
    if plan.mode == "strong":
        sizes = plan.problem_sizes or (plan.base_problem_size,)
        return [(p, s) for p in plan.worker_counts for s in sorted(sizes)]
    min_p = plan.worker_counts[0]
    if plan.base_problem_size % min_p != 0:
        raise ValueError(
            f"weak scaling needs base_problem_size divisible by the smallest "
            f"worker count ({plan.base_problem_size} % {min_p} != 0)"
        )
    per_worker = plan.base_problem_size // min_p
    return [(p, per_worker * p) for p in plan.worker_counts]


@dataclass(frozen=True)
class CellResult:
    workload_id: str
    workers: int
    problem_size: int
    mean_wall: float
    mean_total_comp: float
    metrics: GranularityMetrics
    kept: int
    rejected: int
    actual_speedup: Optional[float] = None
    relative_error: Optional[float] = None

    @property
    def cell_key(self) -> tuple:
        return (self.workload_id, self.workers, self.problem_size)

    def to_dict(self) -> dict:
        return {
            "workload_id": self.workload_id,
            "workers": self.workers,
            "problem_size": self.problem_size,
            "mean_wall": self.mean_wall,
            "mean_total_comp": self.mean_total_comp,
            "overhead": self.metrics.overhead,
            "granularity": self.metrics.granularity,
            "efficiency": self.metrics.efficiency,
            "estimated_speedup": self.metrics.estimated_speedup,
            "overhead_clamped": self.metrics.overhead_clamped,
            "kept": self.kept,
            "rejected": self.rejected,
            "actual_speedup": self.actual_speedup,
            "relative_error": self.relative_error,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CellResult":
        metrics = GranularityMetrics(
            overhead=obj["overhead"],
            granularity=obj["granularity"],
            efficiency=obj["efficiency"],
            estimated_speedup=obj["estimated_speedup"],
            overhead_clamped=obj["overhead_clamped"],
        )
        return cls(
            workload_id=obj["workload_id"],
            workers=obj["workers"],
            problem_size=obj["problem_size"],
            mean_wall=obj["mean_wall"],
            mean_total_comp=obj["mean_total_comp"],
            metrics=metrics,
            kept=obj["kept"],
            rejected=obj["rejected"],
            actual_speedup=obj.get("actual_speedup"),
            relative_error=obj.get("relative_error"),
        )


@dataclass
class ResultSet:
    plan: ExperimentPlan
    plan_hash: str
    cells: list[CellResult] = field(default_factory=list)

    @property
    def mode(self) -> str:
        return self.plan.mode


def _run_seed(plan_seed: int, workers: int, size: int, rep: int) -> int:
    ss = np.random.SeedSequence([plan_seed & ((1 << 64) - 1), workers, size, rep])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _cell_spec(plan: ExperimentPlan, size: int, seed: int) -> WorkloadSpec:
    wl = plan.workload
    if isinstance(wl, KMeansSpec):
        return replace(wl, n_points=size, seed=seed)
    if isinstance(wl, PiSpec):
        return replace(wl, n_samples=size, seed=seed)
    # Synthetic has no data size; the problem-size axis scales its iterations.
    return replace(wl, iterations=size)


def _execute_run(plan: ExperimentPlan, workers: int, size: int, seed: int) -> RunRecord:
    spec = _cell_spec(plan, size, seed)
    if isinstance(spec, KMeansSpec):
        data = generate_dataset(spec)  # untimed: built before the run opens
        handle = begin_run("kmeans", workers, size, seed)
        _, _, record = kmeans_parallel(spec, data, workers, handle)
    elif isinstance(spec, PiSpec):
        handle = begin_run("pi", workers, size, seed)
        _, record = monte_carlo_pi(spec, workers, handle)
    else:
        handle = begin_run("synthetic", workers, size, seed)
        record = synthetic_run(spec, workers, handle)
    return record


@dataclass
class _CellMeasurement:
    walls: list[float]
    comps: list[float]
    kept: int
    rejected: int
    records: list[RunRecord]

    @property
    def mean_wall(self) -> float:
        return float(np.mean(self.walls))

    @property
    def mean_comp(self) -> float:
        return float(np.mean(self.comps))


def _measure_cell(plan: ExperimentPlan, workers: int, size: int) -> _CellMeasurement:
    _execute_run(plan, workers, size, _run_seed(plan.seed, workers, size, 0))  # warm-up

    records: list[RunRecord] = []
    rep = 1  # counted repetitions; 0 is the warm-up
    for _ in range(plan.repetitions):
        records.append(_execute_run(plan, workers, size, _run_seed(plan.seed, workers, size, rep)))
        rep += 1

    total_rejected = 0
    attempts = 0
    while True:
        walls = [r.wall_clock for r in records]
        decision = stats.filter_outliers(walls, side=plan.outlier_side)
        lower, upper = decision.fences
        if len(walls) >= stats.MIN_SAMPLES_FOR_REJECTION:
            kept_records = [r for r in records if lower <= r.wall_clock <= upper]
        else:
            kept_records = list(records)
        n_rejected = len(records) - len(kept_records)
        if n_rejected == 0:
            break
        total_rejected += n_rejected
        if not plan.rerun_outliers or attempts >= MAX_REFILL_ATTEMPTS:
            if len(kept_records) < plan.repetitions:
                log.warning(
                    "cell (p=%d, size=%d): reporting with %d/%d samples after "
                    "outlier rejection",
                    workers, size, len(kept_records), plan.repetitions,
                )
            records = kept_records
            break
        # Rejected runs are dropped atomically and re-measured.
        attempts += 1
        records = kept_records
        for _ in range(n_rejected):
            records.append(
                _execute_run(plan, workers, size, _run_seed(plan.seed, workers, size, rep))
            )
            rep += 1

    breakdowns = [aggregate(r) for r in records]
    return _CellMeasurement(
        walls=[r.wall_clock for r in records],
        comps=[b.total_comp for b in breakdowns],
        kept=len(records),
        rejected=total_rejected,
        records=records,
    )


def _load_results_file(path: Path) -> tuple[dict, list[CellResult]]:
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty results file")
    try:
        header = json.loads(lines[0])
        if "plan_hash" not in header or "plan" not in header:
            raise ValueError("missing header fields")
    except (json.JSONDecodeError, ValueError) as exc:
        raise ValueError(f"{path}: corrupt header at line 1: {exc}") from exc
    cells = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            cells.append(CellResult.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValueError(f"{path}: corrupt record at line {i}: {exc}") from exc
    return header, cells


def _pin_process(max_workers: int) -> None:
    # Best effort and platform dependent: restricts the whole process to the
    # first max_workers CPUs; no per-thread placement is attempted.
    if not hasattr(os, "sched_setaffinity"):
        log.warning("core pinning not supported on this platform")
        return
    n = min(max_workers, os.cpu_count() or 1)
    os.sched_setaffinity(0, set(range(n)))


def run_plan(
    plan: ExperimentPlan,
    out_path: Optional[Union[str, Path]] = None,
    resume: bool = False,
    pin_cores: bool = False,
    records_path: Optional[Union[str, Path]] = None,
) -> ResultSet:
    """Execute every cell of the plan, persisting results cell by cell.

    With resume=True, cells already present in out_path are skipped; seeds
    are derived per (cell, repetition), so a resumed sweep of a
    deterministic workload equals an uninterrupted one.
    """
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        plan = replace(plan, seed=int(env_seed))
    h = plan_hash(plan)
    cells = plan_cells(plan)

    max_p = max(plan.worker_counts)
    host_cpus = os.cpu_count() or 1
    if host_cpus < max_p:
        log.warning(
            "host has %d logical processors, plan asks for %d workers; "
            "timings will not show real parallel speedup", host_cpus, max_p,
        )
    if pin_cores:
        _pin_process(max_p)

    completed: dict[tuple, CellResult] = {}
    out_file = None
    if out_path is not None:
        out_path = Path(out_path)
        if resume and out_path.exists():
            header, prior = _load_results_file(out_path)
            if header["plan_hash"] != h:
                raise ValueError("plan mismatch")
            completed = {c.cell_key: c for c in prior}
            out_file = out_path.open("a")
        else:
            out_file = out_path.open("w")
            out_file.write(
                json.dumps({"plan_hash": h, "plan": plan.to_dict(), "tool_version": TOOL_VERSION})
                + "\n"
            )
            out_file.flush()

    records_file = Path(records_path).open("a") if records_path else None
    results = ResultSet(plan=plan, plan_hash=h)
    baselines: dict[int, float] = {}

    def baseline_wall(size: int) -> float:
        if size not in baselines:
            baselines[size] = _measure_cell(plan, 1, size).mean_wall
        return baselines[size]

    try:
        for workers, size in cells:
            key = (plan.workload_id, workers, size)
            if key in completed:
                prior_cell = completed[key]
                results.cells.append(prior_cell)
                if workers == 1:
                    baselines.setdefault(size, prior_cell.mean_wall)
                continue
            try:
                m = _measure_cell(plan, workers, size)
            except Exception as exc:
                raise CellExecutionError(key, exc) from exc

            if records_file is not None:
                for rec in m.records:
                    records_file.write(rec.to_json() + "\n")
                records_file.flush()

            if workers == 1:
                baselines.setdefault(size, m.mean_wall)
            breakdown = TimingBreakdown(workers, m.mean_wall, m.mean_comp)
            metrics = granularity_metrics(breakdown)
            actual = rel_err = None
            if plan.measure_serial_baseline:
                actual = baseline_wall(size) / m.mean_wall
                rel_err = relative_error(actual, metrics.estimated_speedup)
            cell = CellResult(
                workload_id=plan.workload_id,
                workers=workers,
                problem_size=size,
                mean_wall=m.mean_wall,
                mean_total_comp=m.mean_comp,
                metrics=metrics,
                kept=m.kept,
                rejected=m.rejected,
                actual_speedup=actual,
                relative_error=rel_err,
            )
            results.cells.append(cell)
            if out_file is not None:
                out_file.write(json.dumps(cell.to_dict()) + "\n")
                out_file.flush()
    finally:
        if out_file is not None:
            out_file.close()
        if records_file is not None:
            records_file.close()
    return results


def resume(results_path: Union[str, Path], pin_cores: bool = False) -> ResultSet:
    """Continue an interrupted sweep from its results file.

    The plan is reconstructed from the file header; completed cells are kept
    verbatim and only missing cells execute.
    """
    header, _ = _load_results_file(Path(results_path))
    plan = ExperimentPlan.from_dict(header["plan"])
    if plan_hash(plan) != header["plan_hash"]:
        raise ValueError("plan mismatch")
    return run_plan(plan, out_path=results_path, resume=True, pin_cores=pin_cores)


def load_results(results_path: Union[str, Path]) -> ResultSet:
    """Read a results file back into a ResultSet."""
    header, cells = _load_results_file(Path(results_path))
    plan = ExperimentPlan.from_dict(header["plan"])
    return ResultSet(plan=plan, plan_hash=header["plan_hash"], cells=cells)
