"""Monte Carlo estimation of pi by quarter-circle rejection sampling.

Samples are split over a fixed number of logical RNG shards, each seeded
from (seed, shard index) via PCG64. Workers process whole shards, so the
per-shard hit counts (and therefore the estimate) are bit-identical for any
worker count. The sampling loop is timed as compute spans; the final tally
reduction is not.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..measurement import RunHandle, RunRecord
from ._pool import run_workers

_SEED_MASK = (1 << 64) - 1

#: Logical RNG shards, independent of worker count.
N_SHARDS = 64

#: Samples generated per numpy call; bounds memory, fixed per shard so the
#: generation sequence never depends on the worker layout.
_CHUNK = 1_000_000


@dataclass(frozen=True)
class PiSpec:
    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


def _shard_sizes(n_samples: int) -> list[int]:
    base, rem = divmod(n_samples, N_SHARDS)
    return [base + (1 if s < rem else 0) for s in range(N_SHARDS)]


def _sample_shard(seed: int, shard: int, m: int) -> int:
    rng = np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, shard]))
    hits = 0
    for off in range(0, m, _CHUNK):
        n = min(_CHUNK, m - off)
        x = rng.random(n)
        y = rng.random(n)
        hits += int(np.count_nonzero(x * x + y * y <= 1.0))
    return hits


def monte_carlo_pi(
    spec: PiSpec, workers: int, run_handle: RunHandle
) -> tuple[float, RunRecord]:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    sizes = _shard_sizes(spec.n_samples)
    shard_hits = [0] * N_SHARDS

    def body(w, barrier):
        recorded = False
        for shard in range(w, N_SHARDS, workers):
            m = sizes[shard]
            if m == 0:
                continue
            t0 = time.perf_counter()
            shard_hits[shard] = _sample_shard(spec.seed, shard, m)
            t1 = time.perf_counter()
            run_handle.record_span(w, t1 - t0, "sample")
            recorded = True
        if not recorded:
            # Keep worker coverage complete even when the worker drew no
            # non-empty shard (tiny sample counts).
            run_handle.record_span(w, 0.0, "sample")

    run_workers(workers, body)
    total_hits = sum(shard_hits)  # tally reduction: untimed
    run_handle.iterations = 1
    record = run_handle.finish()
    return 4.0 * total_hits / spec.n_samples, record
