import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from granscale.measurement import aggregate, begin_run
from granscale.metrics import granularity_metrics
from granscale.workloads import (
    KMeansSpec,
    PiSpec,
    SyntheticSpec,
    generate_dataset,
    kmeans_parallel,
    kmeans_serial,
    monte_carlo_pi,
    synthetic_run,
)
from granscale.workloads.kmeans import _partition_bounds

PHASES = {"assign", "partial_sums", "update", "sample", "busy"}


def _run_kmeans(spec, data, workers):
    h = begin_run("kmeans", workers, spec.n_points, spec.seed)
    return kmeans_parallel(spec, data, workers, h)


class TestDataset:
    def test_deterministic(self):
        spec = KMeansSpec(n_points=1000, n_clusters=4, dims=2, seed=42)
        assert np.array_equal(generate_dataset(spec), generate_dataset(spec))

    def test_minimal_one_point_per_blob(self):
        spec = KMeansSpec(n_points=4, n_clusters=4, dims=2, seed=1)
        data = generate_dataset(spec)
        assert data.shape == (4, 2)
        # One point per blob: pairwise distances reflect the blob separation.
        assert cdist(data, data).max() > 5.0

    def test_paper_scale_shape_only(self):
        spec = KMeansSpec(n_points=983040, n_clusters=1024, dims=8, seed=42)
        data = generate_dataset(spec)
        assert data.shape == (983040, 8)

    def test_invariants(self):
        with pytest.raises(ValueError):
            KMeansSpec(n_points=3, n_clusters=4, dims=2)
        with pytest.raises(ValueError):
            KMeansSpec(n_points=4, n_clusters=4, dims=0)


class TestKMeansSerial:
    def test_square_corners_fixed_point(self):
        # 4 points at the corners of a square with one centroid seeded on
        # each point: already converged.
        data = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        spec = KMeansSpec(n_points=4, n_clusters=4, dims=2, max_iterations=10,
                          convergence_epsilon=1e-9, seed=0)
        centroids, labels, iterations = kmeans_serial(spec, data)
        assert iterations == 1
        assert sorted(map(tuple, centroids)) == sorted(map(tuple, data))
        assert len(set(labels)) == 4

    def test_k1_closed_form(self):
        spec = KMeansSpec(n_points=50, n_clusters=1, dims=3, max_iterations=1, seed=3)
        data = generate_dataset(spec)
        centroids, labels, _ = kmeans_serial(spec, data)
        assert centroids[0] == pytest.approx(data.mean(axis=0))
        assert set(labels) == {0}

    def test_assignments_match_brute_force(self):
        spec = KMeansSpec(n_points=1000, n_clusters=4, dims=2, max_iterations=10, seed=42)
        data = generate_dataset(spec)
        centroids, labels, _ = kmeans_serial(spec, data)
        # Independent nearest-centroid check over all points.
        brute = np.array(
            [min(range(4), key=lambda j: np.sum((x - centroids[j]) ** 2)) for x in data]
        )
        assert np.array_equal(labels, brute)

    def test_objective_nonincreasing(self):
        spec = KMeansSpec(n_points=500, n_clusters=8, dims=3, max_iterations=1, seed=9)
        data = generate_dataset(spec)

        def objective(centroids):
            return float(cdist(data, centroids, "sqeuclidean").min(axis=1).sum())

        # Re-run with growing iteration caps; the Lloyd objective must not rise.
        values = []
        for iters in range(1, 8):
            c, _, _ = kmeans_serial(
                KMeansSpec(n_points=500, n_clusters=8, dims=3, max_iterations=iters, seed=9),
                data,
            )
            values.append(objective(c))
        assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


class TestKMeansParallel:
    def test_single_worker_bit_identical(self):
        for seed in (0, 1, 7, 42, 12345):
            spec = KMeansSpec(n_points=300, n_clusters=5, dims=3, max_iterations=6, seed=seed)
            data = generate_dataset(spec)
            c_s, a_s, _ = kmeans_serial(spec, data)
            c_p, a_p, _ = _run_kmeans(spec, data, 1)
            assert np.array_equal(c_s, c_p)
            assert np.array_equal(a_s, a_p)

    def test_four_workers_close_to_serial(self):
        spec = KMeansSpec(n_points=1000, n_clusters=4, dims=2, max_iterations=10, seed=42)
        data = generate_dataset(spec)
        c_s, _, _ = kmeans_serial(spec, data)
        c_p, _, _ = _run_kmeans(spec, data, 4)
        assert np.max(np.abs(c_p - c_s)) < 1e-6

    def test_record_structure(self):
        spec = KMeansSpec(n_points=4000, n_clusters=16, dims=4, max_iterations=3, seed=1)
        data = generate_dataset(spec)
        _, _, rec = _run_kmeans(spec, data, 8)
        assert rec.workers == 8
        per_worker = {w: 0 for w in range(8)}
        for s in rec.spans:
            per_worker[s.worker_id] += 1
            assert s.phase_label in PHASES
        # At least assignment + partial-sum spans per iteration per worker.
        assert all(n >= 2 * rec.iterations for n in per_worker.values())

    def test_partition_property(self):
        for n, p in [(10, 3), (100, 7), (16, 16), (5, 1)]:
            bounds = _partition_bounds(n, p)
            sizes = [hi - lo for lo, hi in bounds]
            assert sum(sizes) == n
            assert max(sizes) - min(sizes) <= 1
            assert bounds[0][0] == 0 and bounds[-1][1] == n

    def test_underfilled_partition(self):
        spec = KMeansSpec(n_points=4, n_clusters=2, dims=2, seed=0)
        data = generate_dataset(spec)
        with pytest.raises(ValueError, match="underfilled partition"):
            _run_kmeans(spec, data, 8)


class TestMonteCarloPi:
    def test_single_sample_extreme(self):
        h = begin_run("pi", 1, 1, 3)
        est, _ = monte_carlo_pi(PiSpec(n_samples=1, seed=3), 1, h)
        assert est in (0.0, 4.0)

    def test_worker_count_invariance(self):
        estimates = []
        for p in (1, 2, 4):
            h = begin_run("pi", p, 100_000, 42)
            est, rec = monte_carlo_pi(PiSpec(n_samples=100_000, seed=42), p, h)
            estimates.append(est)
            assert {s.worker_id for s in rec.spans} == set(range(p))
        assert estimates[0] == estimates[1] == estimates[2]

    def test_accuracy(self):
        h = begin_run("pi", 2, 1_000_000, 7)
        est, _ = monte_carlo_pi(PiSpec(n_samples=1_000_000, seed=7), 2, h)
        # Binomial std dev at N=1e6 is ~1.6e-3; 0.02 is a >12 sigma bound.
        assert abs(est - math.pi) < 0.02

    def test_tiny_sample_worker_coverage(self):
        # More workers than non-empty shards: idle workers still record a span.
        h = begin_run("pi", 4, 2, 5)
        _, rec = monte_carlo_pi(PiSpec(n_samples=2, seed=5), 4, h)
        assert {s.worker_id for s in rec.spans} == set(range(4))
        assert rec.flags == ()


class TestSynthetic:
    def test_measured_granularity_matches_construction(self):
        spec = SyntheticSpec(compute_ms_per_worker=90, exchange_ms_per_worker=10, iterations=5)
        h = begin_run("synthetic", 4, 5, 0)
        rec = synthetic_run(spec, 4, h)
        m = granularity_metrics(aggregate(rec))
        assert m.granularity == pytest.approx(9.0, rel=0.15)

    def test_equal_split_efficiency(self):
        spec = SyntheticSpec(compute_ms_per_worker=10, exchange_ms_per_worker=10, iterations=10)
        h = begin_run("synthetic", 2, 10, 0)
        rec = synthetic_run(spec, 2, h)
        m = granularity_metrics(aggregate(rec))
        assert abs(m.efficiency - 0.5) <= 0.08

    def test_serial_no_overhead_limit(self):
        spec = SyntheticSpec(compute_ms_per_worker=50, exchange_ms_per_worker=0.001,
                             iterations=5)
        h = begin_run("synthetic", 1, 5, 0)
        rec = synthetic_run(spec, 1, h)
        m = granularity_metrics(aggregate(rec))
        assert m.efficiency > 0.9

    def test_simulated_mode_exact(self):
        spec = SyntheticSpec(90, 10, 10, simulate=True)
        h = begin_run("synthetic", 4, 10, 0)
        rec = synthetic_run(spec, 4, h)
        b = aggregate(rec)
        assert b.wall_clock == pytest.approx(1.0)
        assert b.total_comp == pytest.approx(4 * 0.9)
        m = granularity_metrics(b)
        assert m.granularity == pytest.approx(9.0)
        assert m.efficiency == pytest.approx(0.9)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            SyntheticSpec(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            SyntheticSpec(1.0, 1.0, 0)

    def test_phase_labels(self):
        h = begin_run("synthetic", 2, 2, 0)
        rec = synthetic_run(SyntheticSpec(1, 1, 2), 2, h)
        assert {s.phase_label for s in rec.spans} == {"busy"}
