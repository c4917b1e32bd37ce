"""Core speedup/efficiency arithmetic.

Everything here is a pure function over immutable values: the overhead
decomposition (overhead = p*T_wall - total_comp), granularity and the
efficiency it implies (E = G/(G+1)), the classic strong/weak scaling laws,
and the algebraic inverses used when fitting measured speedups back to a
parallel fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

#: Granularity reported when measured overhead is below the noise floor.
INFINITE_GRANULARITY = math.inf

#: Overheads below this (seconds) are treated as timer noise, not signal.
OVERHEAD_FLOOR = 1e-9

# Slack on the total_comp <= workers * wall_clock budget, covering timer
# resolution when spans butt up against the wall-clock envelope.
_BUDGET_EPS = 1e-6


@dataclass(frozen=True)
class TimingBreakdown:
    """One run's worker count, wall-clock time, and summed computation time."""

    workers: int
    wall_clock: float
    total_comp: float

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.wall_clock <= 0:
            raise ValueError(f"wall_clock must be positive, got {self.wall_clock}")
        if self.total_comp < 0:
            raise ValueError(f"total_comp must be >= 0, got {self.total_comp}")
        budget = self.workers * self.wall_clock * (1.0 + _BUDGET_EPS)
        if self.total_comp > budget:
            raise ValueError(
                f"total_comp {self.total_comp} exceeds available worker-seconds "
                f"{self.workers} * {self.wall_clock}"
            )


class Overhead(NamedTuple):
    """Overhead in seconds, plus whether a negative raw value was clamped."""

    seconds: float
    clamped: bool


@dataclass(frozen=True)
class GranularityMetrics:
    """Derived overhead, granularity, efficiency, and estimated speedup."""

    overhead: float
    granularity: float
    efficiency: float
    estimated_speedup: float
    overhead_clamped: bool = False


@dataclass(frozen=True)
class ScalingModelParams:
    """Parallel fractions for the strong (Amdahl) and weak (Gustafson) laws."""

    parallel_fraction: float = 0.0
    scaled_parallel_fraction: float = 0.0

    def __post_init__(self):
        for name in ("parallel_fraction", "scaled_parallel_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


class FractionEstimate(NamedTuple):
    """Inferred parallel fraction; anomalous marks a clamped (out-of-model) fit."""

    value: float
    anomalous: bool


def compute_overhead(breakdown: TimingBreakdown) -> Overhead:
    """Overhead seconds of a run: workers * wall_clock - total_comp.

    Raw negatives (possible only through timer noise at workers=1) clamp
    to zero and are flagged.
    """
    raw = breakdown.workers * breakdown.wall_clock - breakdown.total_comp
    if raw < 0.0:
        return Overhead(0.0, True)
    return Overhead(raw, False)


def isogranularity(total_comp: float, overhead: float) -> float:
    """Ratio of computation time to overhead time.

    Overheads below OVERHEAD_FLOOR are indistinguishable from timer noise
    and yield INFINITE_GRANULARITY instead of a meaningless huge float.
    """
    if total_comp < 0 or overhead < 0:
        raise ValueError("total_comp and overhead must be >= 0")
    if total_comp == 0.0 and overhead < OVERHEAD_FLOOR:
        raise ValueError("empty measurement")
    if overhead < OVERHEAD_FLOOR:
        return INFINITE_GRANULARITY
    return total_comp / overhead


def efficiency_from_granularity(g: float) -> float:
    """Efficiency implied by granularity: E = G/(G+1); 1.0 in the infinite limit."""
    if g < 0:
        raise ValueError(f"granularity must be >= 0, got {g}")
    if math.isinf(g):
        return 1.0
    return g / (g + 1.0)


def estimated_speedup(efficiency: float, workers: int) -> float:
    """Speedup implied by efficiency: S = E * p."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return efficiency * workers


def granularity_metrics(breakdown: TimingBreakdown) -> GranularityMetrics:
    """Full estimator pipeline for one run's timing breakdown."""
    overhead = compute_overhead(breakdown)
    g = isogranularity(breakdown.total_comp, overhead.seconds)
    e = efficiency_from_granularity(g)
    return GranularityMetrics(
        overhead=overhead.seconds,
        granularity=g,
        efficiency=e,
        estimated_speedup=estimated_speedup(e, breakdown.workers),
        overhead_clamped=overhead.clamped,
    )


def amdahl_speedup(params: ScalingModelParams, n: int) -> float:
    """Strong-scaling speedup at n units: 1 / ((1-f) + f/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    f = params.parallel_fraction
    if f == 1.0:
        return float(n)
    return 1.0 / ((1.0 - f) + f / n)


def gustafson_speedup(params: ScalingModelParams, n: int) -> float:
    """Weak-scaling speedup at n units: 1 + (n-1) * f_scaled."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1.0 + (n - 1) * params.scaled_parallel_fraction


def infer_amdahl_fraction(measured_speedup: float, n: int) -> FractionEstimate:
    """Invert the strong-scaling law for the parallel fraction.

    Speedups outside [1, n] cannot come from the model; the result is
    clamped to [0, 1] and flagged anomalous (superlinear/sublinear).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if measured_speedup <= 0:
        return FractionEstimate(0.0, True)
    raw = (1.0 / measured_speedup - 1.0) / (1.0 / n - 1.0)
    clamped = min(1.0, max(0.0, raw))
    return FractionEstimate(clamped, clamped != raw)


def infer_gustafson_fraction(measured_speedup: float, n: int) -> FractionEstimate:
    """Invert the weak-scaling law for the scaled parallel fraction."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if measured_speedup < 0:
        raise ValueError(f"measured_speedup must be >= 0, got {measured_speedup}")
    raw = (measured_speedup - 1.0) / (n - 1.0)
    clamped = min(1.0, max(0.0, raw))
    return FractionEstimate(clamped, clamped != raw)


def relative_error(actual_speedup: float, estimated: float) -> float:
    """Signed relative error of an estimate: (estimated - actual) / actual."""
    if actual_speedup <= 0:
        raise ValueError(f"actual_speedup must be positive, got {actual_speedup}")
    return (estimated - actual_speedup) / actual_speedup
