"""Parallel Lloyd K-means with instrumented compute phases.

Each worker owns a block of points. Per iteration it assigns its block to
the nearest centroid and accumulates partial sums (both timed as compute
spans), publishes the partials, waits at a barrier (untimed, lands in
overhead), and then recomputes the new centroids itself from everyone's
partials (execution replication, timed). Partials are always merged in
worker order, so every worker holds bit-identical centroids and the
single-worker run reproduces the serial implementation exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.spatial.distance import cdist

from ..measurement import RunHandle, RunRecord
from ._pool import run_workers

_SEED_MASK = (1 << 64) - 1

# Blob centers sit on a lattice with this spacing; blob noise is unit std,
# so clusters stay well separated for any k and dimension.
_CENTER_SPACING = 10.0


@dataclass(frozen=True)
class KMeansSpec:
    n_points: int
    n_clusters: int
    dims: int
    max_iterations: int = 10
    convergence_epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 1 or self.n_clusters < 1:
            raise ValueError("n_points and n_clusters must be positive")
        if self.n_points < self.n_clusters:
            raise ValueError("n_points must be >= n_clusters")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_epsilon < 0:
            raise ValueError("convergence_epsilon must be >= 0")


def _blob_centers(k: int, dims: int) -> np.ndarray:
    side = math.ceil(k ** (1.0 / dims))
    pts = []
    for coords in product(range(side), repeat=dims):
        pts.append(coords)
        if len(pts) == k:
            break
    return np.asarray(pts, dtype=float) * _CENTER_SPACING


def generate_dataset(spec: KMeansSpec) -> np.ndarray:
    """k well-separated Gaussian blobs; bit-identical for a fixed seed."""
    rng = np.random.default_rng(spec.seed & _SEED_MASK)
    centers = _blob_centers(spec.n_clusters, spec.dims)
    blob_of = np.arange(spec.n_points) % spec.n_clusters
    return centers[blob_of] + rng.normal(size=(spec.n_points, spec.dims))


def _initial_centroids(spec: KMeansSpec, data: np.ndarray) -> np.ndarray:
    rng = np.random.default_rng(spec.seed & _SEED_MASK)
    idx = rng.choice(spec.n_points, size=spec.n_clusters, replace=False)
    return data[idx].copy()


def _assign(chunk: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return cdist(chunk, centroids, "sqeuclidean").argmin(axis=1)


def _partials(chunk: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(labels, minlength=k).astype(float)
    sums = np.empty((k, chunk.shape[1]))
    for j in range(chunk.shape[1]):
        sums[:, j] = np.bincount(labels, weights=chunk[:, j], minlength=k)
    return counts, sums


def _update(sums: np.ndarray, counts: np.ndarray, old: np.ndarray) -> np.ndarray:
    # Empty clusters keep their previous centroid.
    new = old.copy()
    occupied = counts > 0
    new[occupied] = sums[occupied] / counts[occupied, None]
    return new


def _check_data(spec: KMeansSpec, data: np.ndarray) -> None:
    if data.shape != (spec.n_points, spec.dims):
        raise ValueError(
            f"data shape {data.shape} does not match spec "
            f"({spec.n_points}, {spec.dims})"
        )


def kmeans_serial(spec: KMeansSpec, data: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Reference single-threaded Lloyd iterations; the correctness oracle."""
    _check_data(spec, data)
    centroids = _initial_centroids(spec, data)
    iterations = 0
    for _ in range(spec.max_iterations):
        labels = _assign(data, centroids)
        counts, sums = _partials(data, labels, spec.n_clusters)
        new = _update(sums, counts, centroids)
        displacement = float(np.max(np.abs(new - centroids)))
        centroids = new
        iterations += 1
        if displacement < spec.convergence_epsilon:
            break
    labels = _assign(data, centroids)
    return centroids, labels, iterations


def _partition_bounds(n: int, workers: int) -> list[tuple[int, int]]:
    base, rem = divmod(n, workers)
    bounds = []
    start = 0
    for w in range(workers):
        size = base + (1 if w < rem else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def kmeans_parallel(
    spec: KMeansSpec,
    data: np.ndarray,
    workers: int,
    run_handle: RunHandle,
) -> tuple[np.ndarray, np.ndarray, RunRecord]:
    _check_data(spec, data)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers > spec.n_points:
        raise ValueError("underfilled partition")

    init = _initial_centroids(spec, data)
    bounds = _partition_bounds(spec.n_points, workers)
    k = spec.n_clusters

    partial_counts: list = [None] * workers
    partial_sums: list = [None] * workers
    labels_out = np.empty(spec.n_points, dtype=np.int64)
    final = {}
    iterations_done = [0] * workers

    def body(w, barrier):
        lo, hi = bounds[w]
        chunk = data[lo:hi]
        centroids = init.copy()
        iters = 0
        for _ in range(spec.max_iterations):
            t0 = time.perf_counter()
            labels = _assign(chunk, centroids)
            t1 = time.perf_counter()
            run_handle.record_span(w, t1 - t0, "assign")

            t0 = time.perf_counter()
            counts, sums = _partials(chunk, labels, k)
            t1 = time.perf_counter()
            run_handle.record_span(w, t1 - t0, "partial_sums")

            partial_counts[w] = counts
            partial_sums[w] = sums
            barrier.wait()  # exchange of partials: untimed, becomes overhead

            # Replicated centroid update; worker-order merge keeps every
            # worker's result bit-identical.
            t0 = time.perf_counter()
            total_counts = partial_counts[0].copy()
            total_sums = partial_sums[0].copy()
            for other in range(1, workers):
                total_counts += partial_counts[other]
                total_sums += partial_sums[other]
            new = _update(total_sums, total_counts, centroids)
            displacement = float(np.max(np.abs(new - centroids)))
            centroids = new
            t1 = time.perf_counter()
            run_handle.record_span(w, t1 - t0, "update")

            iters += 1
            barrier.wait()  # partials consumed before the next overwrite
            if displacement < spec.convergence_epsilon:
                break

        t0 = time.perf_counter()
        labels_out[lo:hi] = _assign(chunk, centroids)
        t1 = time.perf_counter()
        run_handle.record_span(w, t1 - t0, "assign")
        iterations_done[w] = iters
        if w == 0:
            final["centroids"] = centroids

    run_workers(workers, body)
    run_handle.iterations = iterations_done[0]
    record = run_handle.finish()
    return final["centroids"], labels_out, record
