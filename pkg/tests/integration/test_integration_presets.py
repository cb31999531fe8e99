"""Integration tests for whole runs over the bundled presets.

Test Coverage:
- DDC-DBSCAN cluster counts and ARI on t1-t6
- Communication reduction on every preset
- Tree-shape independence and the merge fixpoint
- Distributed versus single-machine DBSCAN on t1-t3
- DDC-K-Means successes on convex data and failures on noisy non-convex data

Performance: Slow (every preset is generated and clustered); run with -m slow
"""

from functools import lru_cache

import pytest

from ddc_tools.core.evaluation import adjusted_rand_index, oracle_single_machine
from ddc_tools.core.local_cluster import DbscanParams
from ddc_tools.engine.config import resolve_run_config
from ddc_tools.engine.ddc import find_overlaps
from ddc_tools.engine.experiment import ExperimentRunner

pytestmark = pytest.mark.slow

EXPECTED_CLUSTERS = {"t1": 5, "t2": 5, "t3": 4, "t4": 6, "t5": 9, "t6": 6}


@lru_cache(maxsize=None)
def run_preset(name, **overrides):
    """Run a preset once per distinct override set."""
    config = resolve_run_config(preset=name, overrides=dict(overrides))
    return ExperimentRunner(config).run()


class TestDbscanPresets:
    """DDC-DBSCAN on five nodes."""

    @pytest.mark.parametrize("name,expected", sorted(EXPECTED_CLUSTERS.items()))
    def test_cluster_count_and_ari(self, name, expected):
        outcome = run_preset(name)

        assert outcome.config.n_nodes == 5
        assert outcome.model.n_clusters == expected
        assert outcome.report.ari >= 0.95

    @pytest.mark.parametrize("name", sorted(EXPECTED_CLUSTERS))
    def test_reduction(self, name):
        report = run_preset(name).report

        assert report.size >= 8000
        assert report.reduction_ratio <= 0.05
        assert report.bytes_exchanged <= 0.05 * report.dataset_bytes

    @pytest.mark.parametrize("name", sorted(EXPECTED_CLUSTERS))
    def test_tree_shape_independence(self, name):
        counts = {degree: run_preset(name, degree=degree).model.n_clusters for degree in (2, 3, 5)}
        assert len(set(counts.values())) == 1, counts

    @pytest.mark.parametrize("name", sorted(EXPECTED_CLUSTERS))
    def test_final_model_is_a_fixpoint(self, name):
        outcome = run_preset(name)
        components = find_overlaps(outcome.model.contours, outcome.config.merge_policy)
        assert all(len(c) == 1 for c in components)

    def test_deterministic(self):
        first = run_preset("t1")
        config = resolve_run_config(preset="t1", overrides={"threads": 1})
        second = ExperimentRunner(config).run()

        assert first.model.merge_trace_records() == second.model.merge_trace_records()
        assert first.assignment.labels.tolist() == second.assignment.labels.tolist()


class TestDistributedMatchesCentralised:
    """DDC-DBSCAN assignments against one DBSCAN over the whole dataset."""

    @pytest.mark.parametrize("partition", ["spatial_grid", "random"])
    @pytest.mark.parametrize("name", ["t1", "t2", "t3"])
    def test_ari_against_oracle(self, name, partition):
        outcome = run_preset(name, partition=partition)
        config = outcome.config
        oracle = oracle_single_machine(outcome.dataset, DbscanParams(config.eps, config.min_pts))

        assert outcome.model.n_clusters == oracle.n_clusters
        assert adjusted_rand_index(oracle, outcome.assignment, exclude_noise=True) >= 0.95


class TestKMeansPresets:
    """DDC-K-Means with random partitioning."""

    @pytest.mark.parametrize("name", ["t1", "t2", "t3"])
    def test_convex_presets(self, name):
        outcome = run_preset(name, backend="kmeans", partition="random")
        assert outcome.model.n_clusters == EXPECTED_CLUSTERS[name]

    @pytest.mark.parametrize("name", ["t4", "t5"])
    def test_noisy_non_convex_presets_fail(self, name):
        outcome = run_preset(name, backend="kmeans", partition="random")
        assert outcome.model.n_clusters == 1 or outcome.report.ari < 0.5
