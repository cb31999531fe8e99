"""Integration tests for backend equivalence, complexity and scalability.

Test Coverage:
- The three DBSCAN backends agree on seeded random instances
- Grid-index DBSCAN grows subquadratically with n
- Leaf makespan shrinks with the number of nodes
- Bench rows keep W >= W/O

Performance: Slow (timing runs on up to 50,000 points); run with -m slow
"""

import numpy as np
import pytest

from ddc_tools.core.local_cluster import DbscanParams, dbscan
from ddc_tools.engine.bench import bench_presets, complexity_ratios, scalability_sweep

pytestmark = pytest.mark.slow


class TestBackendEquivalence:
    """grid_index, distance_matrix and brute_force labelings."""

    def test_hundred_random_instances(self):
        rng = np.random.default_rng(2024)
        for instance in range(100):
            n = int(rng.integers(20, 2001))
            side = float(np.sqrt(n / 4.0))
            points = rng.uniform(0, side, size=(n, 2))
            eps = float(rng.uniform(0.3, 0.8))
            min_pts = int(rng.integers(2, 8))

            labelings = [
                dbscan(points, DbscanParams(eps, min_pts, backend=backend)).labels.tolist()
                for backend in ("grid_index", "distance_matrix", "brute_force")
            ]
            assert labelings[0] == labelings[1] == labelings[2], f"instance {instance}"


class TestComplexity:
    """Growth of grid-index DBSCAN time."""

    def test_doubling_at_most_triples_time(self):
        results = complexity_ratios(sizes=(10_000, 20_000, 40_000), repetitions=5)
        ratios = [ratio for _, _, ratio in results if ratio is not None]

        assert len(ratios) == 2
        assert all(ratio <= 3.0 for ratio in ratios), results


class TestScalability:
    """Simulated makespans over node counts."""

    def test_sixteen_nodes_eight_times_faster(self):
        rows = scalability_sweep([1, 16], repetitions=3)
        one, sixteen = rows

        assert one["SIZE"] == 50_000
        assert one["N_CLUSTERS"] == sixteen["N_CLUSTERS"] == 5
        assert one["LEAF_MAKESPAN"] >= 8 * sixteen["LEAF_MAKESPAN"]

    def test_bench_rows_with_and_without_matrix(self):
        (row,) = bench_presets(["t4"], repetitions=1)
        assert row["DDC-DBSCAN W"] >= row["DDC-DBSCAN W/O"]
        assert row["SIZE"] == 8000
