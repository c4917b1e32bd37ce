"""Repetition statistics: Tukey 1.5*IQR outlier rejection and averaging.

Quartiles use linear interpolation on order statistics (the type-7
convention, numpy's default), stated explicitly so results reproduce
bit-for-bit elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_REPETITIONS = 10

# Fences only apply from this many samples; below it every value is kept.
MIN_SAMPLES_FOR_REJECTION = 3


@dataclass(frozen=True)
class SampleSet:
    """Metric values for one (workload, workers, problem_size) cell."""

    cell_key: tuple
    values: tuple[float, ...]
    target_repetitions: int = DEFAULT_REPETITIONS

    def __post_init__(self):
        if not self.values:
            raise ValueError("SampleSet requires at least one value")


@dataclass(frozen=True)
class OutlierDecision:
    kept: tuple[float, ...]
    rejected: tuple[float, ...]
    fences: tuple[float, float]


def quartiles(values: Sequence[float]) -> tuple[float, float]:
    """First and third quartile by linear interpolation at positions (n-1)*q."""
    if len(values) == 0:
        raise ValueError("quartiles of empty input")
    q1, q3 = np.quantile(np.asarray(values, dtype=float), [0.25, 0.75])
    return float(q1), float(q3)


def filter_outliers(values: Sequence[float], side: str = "both") -> OutlierDecision:
    """Reject values beyond 1.5 interquartile ranges from the quartiles.

    side="upper" applies only the upper fence (the one-sided reading of the
    rejection rule); "both" is the standard Tukey form.
    """
    if side not in ("both", "upper"):
        raise ValueError(f"side must be 'both' or 'upper', got {side}")
    vals = tuple(float(v) for v in values)
    q1, q3 = quartiles(vals)
    iqr = q3 - q1
    lower = q1 - 1.5 * iqr if side == "both" else -math.inf
    upper = q3 + 1.5 * iqr
    if len(vals) < MIN_SAMPLES_FOR_REJECTION:
        return OutlierDecision(kept=vals, rejected=(), fences=(lower, upper))
    kept = tuple(v for v in vals if lower <= v <= upper)
    rejected = tuple(v for v in vals if not lower <= v <= upper)
    return OutlierDecision(kept=kept, rejected=rejected, fences=(lower, upper))


def summarize(samples: SampleSet, side: str = "both") -> tuple[float, int, int]:
    """Mean of the kept values after outlier rejection, with kept/rejected counts."""
    decision = filter_outliers(samples.values, side=side)
    if not decision.kept:
        # Tukey fences always contain the median, so this cannot happen;
        # guard anyway rather than return NaN.
        raise RuntimeError("all samples rejected")
    mean = float(np.mean(decision.kept))
    return mean, len(decision.kept), len(decision.rejected)
