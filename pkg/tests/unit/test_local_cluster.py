"""Unit tests for local clustering.

Test Coverage:
- Labeling invariants and renumbering
- Parameter validation
- Grid index and region queries
- DBSCAN semantics (core, border, noise), brute-force reachability and backend agreement
- Distance-matrix backend and its memory cap
- K-Means determinism, convergence, centroid ordering and k equal to n
"""

import numpy as np
import pytest

from ddc_tools.core.exceptions import InvalidParamError, MemoryBudgetExceededError
from ddc_tools.core.local_cluster import (
    NOISE,
    DbscanBackend,
    DbscanParams,
    KMeansInit,
    KMeansParams,
    Labeling,
    build_grid_index,
    dbscan,
    dbscan_distance_matrix,
    dbscan_with_cores,
    eps_distance_matrix,
    kmeans,
    kmeans_fit,
    region_query,
)


def blobs(rng, centres, n=100, spread=0.5):
    """Points scattered uniformly in squares around each centre, with truth ids."""
    parts = [rng.uniform(-spread, spread, size=(n, 2)) + np.asarray(c) for c in centres]
    truth = np.repeat(np.arange(len(centres)), n)
    return np.concatenate(parts), truth


class TestLabeling:
    """Tests for the Labeling value type."""

    def test_from_labels_renumbers_by_first_appearance(self):
        labeling = Labeling.from_labels([5, 5, -3, 2, 5, 9])
        assert labeling.labels.tolist() == [0, 0, NOISE, 1, 0, 2]
        assert labeling.n_clusters == 3

    def test_all_noise(self):
        labeling = Labeling.from_labels([-1, -1])
        assert labeling.n_clusters == 0
        assert labeling.noise_count == 2

    def test_rejects_out_of_range_ids(self):
        with pytest.raises(InvalidParamError):
            Labeling(np.array([0, 2]), 2)

    def test_rejects_unused_ids(self):
        with pytest.raises(InvalidParamError, match="cluster ids are used"):
            Labeling(np.array([0, 0, -1]), 2)

    def test_sizes_and_members(self):
        labeling = Labeling(np.array([1, 0, 1, -1, 1]), 2)
        assert labeling.cluster_sizes().tolist() == [1, 3]
        assert labeling.members(1).tolist() == [0, 2, 4]
        assert len(labeling) == 5

    def test_labels_are_read_only(self):
        labeling = Labeling(np.array([0, 0]), 1)
        with pytest.raises(ValueError):
            labeling.labels[0] = 1


class TestParams:
    """Tests for parameter validation."""

    @pytest.mark.parametrize("eps,min_pts", [(0.0, 4), (-1.0, 4), (1.0, 0)])
    def test_dbscan_params_rejected(self, eps, min_pts):
        with pytest.raises(InvalidParamError):
            DbscanParams(eps, min_pts)

    def test_dbscan_backend_from_string(self):
        assert DbscanParams(1.0, 4, backend="brute_force").backend is DbscanBackend.BRUTE_FORCE

    def test_dbscan_unknown_backend(self):
        with pytest.raises(InvalidParamError, match="Unknown DBSCAN backend"):
            DbscanParams(1.0, 4, backend="kd_tree")

    @pytest.mark.parametrize("kwargs", [{"k": 0}, {"k": 2, "max_iter": 0}, {"k": 2, "tol": -1.0}])
    def test_kmeans_params_rejected(self, kwargs):
        with pytest.raises(InvalidParamError):
            KMeansParams(**kwargs)

    def test_kmeans_init_from_string(self):
        assert KMeansParams(3, init="kmeans++").init is KMeansInit.KMEANS_PP


class TestGridIndex:
    """Tests for the uniform grid index."""

    def test_cells(self):
        index = build_grid_index([(0.1, 0.1), (0.9, 0.2), (1.5, 0.1), (-0.5, 0.0)], 1.0)
        assert index.cells[(0, 0)].tolist() == [0, 1]
        assert index.cells[(1, 0)].tolist() == [2]
        assert index.cells[(-1, 0)].tolist() == [3]
        assert index.neighbour_ids((0, 0)).tolist() == [0, 1, 2, 3]

    def test_empty(self):
        assert len(build_grid_index([], 1.0)) == 0

    def test_region_query_matches_brute_force(self, rng):
        pts = rng.uniform(0, 10, size=(300, 2))
        eps = 0.8
        index = build_grid_index(pts, eps)
        for centre in (0, 17, 299):
            d = np.hypot(*(pts - pts[centre]).T)
            expected = np.nonzero(d <= eps)[0]
            assert region_query(index, pts, centre, eps).tolist() == expected.tolist()


class TestDbscan:
    """Tests for DBSCAN semantics."""

    def test_two_groups_and_noise(self):
        pts = [(0, 0), (0, 0.1), (0.1, 0), (0.1, 0.1), (5, 5), (5, 5.1), (5.1, 5), (10, 10)]
        labeling = dbscan(pts, DbscanParams(0.2, 3))
        assert labeling.labels.tolist() == [0, 0, 0, 0, 1, 1, 1, NOISE]
        assert labeling.n_clusters == 2

    def test_border_points(self):
        """End points of a chain are border points of the cluster, not noise."""
        result = dbscan_with_cores([(0, 0), (0.5, 0), (1.0, 0), (1.5, 0)], DbscanParams(0.6, 3))
        assert result.labeling.labels.tolist() == [0, 0, 0, 0]
        assert result.core_mask.tolist() == [False, True, True, False]

    def test_min_pts_counts_the_point_itself(self):
        labeling = dbscan([(0, 0), (0.1, 0)], DbscanParams(0.2, 2))
        assert labeling.n_clusters == 1

    def test_all_noise(self, rng):
        pts = rng.uniform(0, 100, size=(50, 2))
        labeling = dbscan(pts, DbscanParams(0.01, 2))
        assert labeling.n_clusters == 0
        assert labeling.noise_count == 50

    def test_empty_input(self):
        labeling = dbscan([], DbscanParams(1.0, 2))
        assert len(labeling) == 0

    def test_separated_blobs(self, rng):
        pts, truth = blobs(rng, [(0, 0), (5, 0), (0, 5)])
        labeling = dbscan(pts, DbscanParams(0.3, 4))
        assert labeling.n_clusters == 3
        for blob in range(3):
            assert len(set(labeling.labels[truth == blob].tolist())) == 1

    @pytest.mark.parametrize("backend", ["distance_matrix", "brute_force"])
    def test_backends_agree(self, rng, backend):
        pts, _ = blobs(rng, [(0, 0), (3, 0), (1.5, 2.5)], n=150, spread=0.8)
        pts = np.concatenate([pts, rng.uniform(-2, 5, size=(40, 2))])
        reference = dbscan_with_cores(pts, DbscanParams(0.25, 5))
        other = dbscan_with_cores(pts, DbscanParams(0.25, 5, backend=backend))
        assert other.labeling.labels.tolist() == reference.labeling.labels.tolist()
        assert other.core_mask.tolist() == reference.core_mask.tolist()

    def test_core_set_is_permutation_invariant(self, rng):
        pts = rng.uniform(0, 5, size=(400, 2))
        params = DbscanParams(0.3, 4)
        perm = rng.permutation(len(pts))
        original = dbscan_with_cores(pts, params).core_mask
        permuted = dbscan_with_cores(pts[perm], params).core_mask
        assert permuted.tolist() == original[perm].tolist()

    def test_matches_reachability_by_brute_force(self, rng):
        """Cores, components and borders agree with an exhaustive neighbourhood search."""
        pts, _ = blobs(rng, [(0, 0), (2.2, 0), (1, 2)], n=120, spread=0.7)
        pts = np.concatenate([pts, rng.uniform(-2, 4, size=(60, 2))])
        params = DbscanParams(0.2, 5)
        result = dbscan_with_cores(pts, params)
        labels = result.labeling.labels

        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        neighbours = d2 <= params.eps**2
        core = neighbours.sum(axis=1) >= params.min_pts
        assert result.core_mask.tolist() == core.tolist()

        n = len(pts)
        component = np.full(n, -1)
        for start in np.nonzero(core)[0]:
            if component[start] >= 0:
                continue
            component[start] = start
            stack = [start]
            while stack:
                i = stack.pop()
                for j in np.nonzero(neighbours[i] & core)[0]:
                    if component[j] < 0:
                        component[j] = start
                        stack.append(j)

        cores = np.nonzero(core)[0]
        pairs = {(component[i], labels[i]) for i in cores}
        assert len({c for c, _ in pairs}) == len(pairs) == len({lab for _, lab in pairs})
        assert result.labeling.n_clusters == len(pairs)

        for i in np.nonzero(~core)[0]:
            near_cores = np.nonzero(neighbours[i] & core)[0]
            if labels[i] == NOISE:
                assert len(near_cores) == 0
            else:
                assert labels[i] in labels[near_cores].tolist()


class TestDistanceMatrix:
    """Tests for the distance-matrix backend."""

    def test_matrix_is_symmetric_and_thresholded(self, rng):
        pts = rng.uniform(0, 3, size=(120, 2))
        matrix = eps_distance_matrix(pts, 0.5)
        dense = matrix.toarray()
        assert np.allclose(dense, dense.T)
        assert matrix.nnz >= len(pts)
        assert dense.max() <= 0.5

    def test_memory_cap(self, rng):
        with pytest.raises(MemoryBudgetExceededError) as exc_info:
            eps_distance_matrix(rng.uniform(size=(20, 2)), 0.1, max_points=10)
        assert exc_info.value.n_points == 20

    def test_dbscan_distance_matrix_reports_times(self, rng):
        pts, _ = blobs(rng, [(0, 0), (4, 4)])
        labeling, build_time, cluster_time = dbscan_distance_matrix(pts, DbscanParams(0.3, 4))
        assert labeling.n_clusters == 2
        assert build_time > 0
        assert cluster_time >= 0

    def test_cap_applies_through_dbscan(self, rng):
        params = DbscanParams(0.1, 2, backend="distance_matrix", max_matrix_points=5)
        with pytest.raises(MemoryBudgetExceededError):
            dbscan(rng.uniform(size=(6, 2)), params)


class TestKMeans:
    """Tests for K-Means."""

    def test_recovers_separated_blobs(self, rng):
        pts, truth = blobs(rng, [(0, 0), (10, 0), (5, 8)])
        labeling = kmeans(pts, KMeansParams(3))
        assert labeling.n_clusters == 3
        for blob in range(3):
            assert len(set(labeling.labels[truth == blob].tolist())) == 1

    def test_deterministic_for_seed(self, rng):
        pts = rng.uniform(0, 10, size=(300, 2))
        first = kmeans(pts, KMeansParams(5, seed=7))
        second = kmeans(pts, KMeansParams(5, seed=7))
        assert first.labels.tolist() == second.labels.tolist()

    @pytest.mark.parametrize("init", ["farthest", "kmeans++"])
    def test_inertia_never_increases(self, rng, init):
        pts = rng.uniform(0, 10, size=(500, 2))
        result = kmeans_fit(pts, KMeansParams(6, seed=3, init=init))
        history = np.array(result.inertia_history)
        assert (np.diff(history) <= 1e-9 * history[0]).all()
        assert result.inertia == history[-1]
        assert 1 <= result.n_iter <= 100

    def test_centroids_sorted(self, rng):
        pts, _ = blobs(rng, [(10, 0), (0, 0), (5, 8)])
        result = kmeans_fit(pts, KMeansParams(3))
        xs = result.centroids[:, 0].tolist()
        assert xs == sorted(xs)
        assert result.labeling.labels[0] == 2

    def test_single_cluster_is_mean(self, rng):
        pts = rng.uniform(0, 1, size=(50, 2))
        result = kmeans_fit(pts, KMeansParams(1))
        assert result.centroids[0] == pytest.approx(pts.mean(axis=0))
        assert (result.labeling.labels == 0).all()

    def test_k_exceeds_distinct_points(self):
        with pytest.raises(InvalidParamError, match="exceeds"):
            kmeans([(0, 0), (0, 0), (1, 1)], KMeansParams(3))

    def test_every_cluster_used(self):
        pts = [(0, 0), (0, 0), (0, 0), (1, 0), (2, 0)]
        labeling = kmeans(pts, KMeansParams(3))
        assert sorted(set(labeling.labels.tolist())) == [0, 1, 2]

    def test_one_cluster_per_point_when_k_equals_n(self, rng):
        pts = rng.uniform(0, 10, size=(12, 2))
        result = kmeans_fit(pts, KMeansParams(12))
        assert sorted(result.labeling.labels.tolist()) == list(range(12))
        assert result.inertia == pytest.approx(0.0, abs=1e-12)
        assert result.centroids[result.labeling.labels] == pytest.approx(pts)
