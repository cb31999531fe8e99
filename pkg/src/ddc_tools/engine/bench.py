"""Timing benchmarks.

Every timed run uses a single worker thread so per-node timings are not
skewed by contention; simulated makespans then reflect what parallel
nodes would need. Reported values are medians over repetitions, in ms.
"""

import csv
import json
import logging
import statistics
import time
from pathlib import Path
from typing import Any, Iterable, Sequence

from ddc_tools.core.data import PartitionStrategy, uniform_points
from ddc_tools.core.exceptions import DataIOError
from ddc_tools.core.local_cluster import DbscanBackend, DbscanParams, dbscan
from ddc_tools.core.validation import require_at_least
from ddc_tools.engine.config import Backend, RunConfig, resolve_run_config
from ddc_tools.engine.constants import DEFAULT_BENCH_REPETITIONS, SCALABILITY_PRESET
from ddc_tools.engine.experiment import ExperimentRunner

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["DATASET", "SIZE", "DDC-K-Means", "DDC-DBSCAN W", "DDC-DBSCAN W/O"]
SCALABILITY_COLUMNS = [
    "N_NODES",
    "SIZE",
    "LEAF_MAKESPAN",
    "MAKESPAN",
    "MAKESPAN_WO_MATRIX",
    "N_CLUSTERS",
]


def _ms(seconds: float) -> float:
    return round(seconds * 1000.0, 3)


def bench(config: RunConfig, repetitions: int = DEFAULT_BENCH_REPETITIONS) -> dict:
    """Median makespans of repeated runs of one configuration.

    Returns:
        Row with SIZE, N_CLUSTERS, MAKESPAN, MAKESPAN_WO_MATRIX and LEAF_MAKESPAN (ms)
    """
    require_at_least(repetitions, 1, "repetitions")
    config = config.merged({"threads": 1})
    runner = ExperimentRunner(config)
    dataset = runner.dataset
    makespans, without, leaves, clusters = [], [], [], []
    for rep in range(repetitions):
        outcome = ExperimentRunner(runner.config, dataset).run()
        makespans.append(outcome.model.makespan)
        without.append(outcome.model.makespan_without_matrix)
        leaves.append(outcome.model.leaf_makespan)
        clusters.append(outcome.model.n_clusters)
        logger.debug("bench %s rep %d: %.3fs", dataset.name, rep, outcome.model.makespan)
    return {
        "SIZE": len(dataset),
        "N_CLUSTERS": clusters[-1],
        "MAKESPAN": _ms(statistics.median(makespans)),
        "MAKESPAN_WO_MATRIX": _ms(statistics.median(without)),
        "LEAF_MAKESPAN": _ms(statistics.median(leaves)),
    }


def preset_configs(
    name: str,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> dict[str, RunConfig]:
    """The DBSCAN and K-Means configurations timed for one preset.

    Both start from the preset, the config file and the overrides. DBSCAN
    always uses the distance-matrix backend; K-Means uses random
    partitioning unless the overrides name a strategy.
    """
    overrides = dict(overrides or {})
    base = resolve_run_config(preset=name, config_path=config_path, overrides=overrides)
    return {
        Backend.DBSCAN.value: base.merged(
            {"backend": Backend.DBSCAN.value, "dbscan_backend": DbscanBackend.DISTANCE_MATRIX.value}
        ),
        Backend.KMEANS.value: base.merged(
            {
                "backend": Backend.KMEANS.value,
                "partition": overrides.get("partition") or PartitionStrategy.RANDOM.value,
            }
        ),
    }


def bench_presets(
    names: Sequence[str],
    repetitions: int = DEFAULT_BENCH_REPETITIONS,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> list[dict]:
    """One row per preset in the DDC-K-Means / DDC-DBSCAN W / W/O layout.

    The DBSCAN columns come from the same distance-matrix runs: W counts the
    matrix build, W/O leaves it out.
    """
    rows = []
    for name in names:
        configs = preset_configs(name, config_path, overrides)
        with_matrix = bench(configs[Backend.DBSCAN.value], repetitions)
        with_kmeans = bench(configs[Backend.KMEANS.value], repetitions)
        rows.append(
            {
                "DATASET": name,
                "SIZE": with_matrix["SIZE"],
                "DDC-K-Means": with_kmeans["MAKESPAN"],
                "DDC-DBSCAN W": with_matrix["MAKESPAN"],
                "DDC-DBSCAN W/O": with_matrix["MAKESPAN_WO_MATRIX"],
            }
        )
        logger.info("bench %s done", name)
    return rows


def scalability_node_counts(max_nodes: int) -> list[int]:
    """Powers of two from 1 up to max_nodes."""
    require_at_least(max_nodes, 1, "max_nodes")
    counts = [1]
    while counts[-1] * 2 <= max_nodes:
        counts.append(counts[-1] * 2)
    return counts


def scalability_config(
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Base configuration of the sweep; the scale preset unless a dataset or preset is named."""
    config = resolve_run_config(config_path=config_path, overrides=overrides)
    if config.dataset is None and config.preset is None:
        config = resolve_run_config(
            preset=SCALABILITY_PRESET, config_path=config_path, overrides=overrides
        )
    return config.merged({"threads": 1})


def scalability_sweep(
    node_counts: Iterable[int],
    repetitions: int = DEFAULT_BENCH_REPETITIONS,
    base: RunConfig | None = None,
) -> list[dict]:
    """Makespans of one fixed dataset over growing node counts."""
    base = base or scalability_config()
    dataset = ExperimentRunner(base).dataset
    rows = []
    for n_nodes in node_counts:
        config = base.merged({"n_nodes": n_nodes, "threads": 1})
        leaves, makespans, without, clusters = [], [], [], 0
        for _ in range(max(1, repetitions)):
            outcome = ExperimentRunner(config, dataset).run()
            leaves.append(outcome.model.leaf_makespan)
            makespans.append(outcome.model.makespan)
            without.append(outcome.model.makespan_without_matrix)
            clusters = outcome.model.n_clusters
        rows.append(
            {
                "N_NODES": n_nodes,
                "SIZE": len(dataset),
                "LEAF_MAKESPAN": _ms(statistics.median(leaves)),
                "MAKESPAN": _ms(statistics.median(makespans)),
                "MAKESPAN_WO_MATRIX": _ms(statistics.median(without)),
                "N_CLUSTERS": clusters,
            }
        )
        logger.info("scalability: %d nodes -> %.1f ms", n_nodes, rows[-1]["MAKESPAN"])
    return rows


def complexity_ratios(
    sizes: Sequence[int] = (10_000, 20_000, 40_000),
    repetitions: int = 5,
    eps: float = 1.0,
    min_pts: int = 4,
    seed: int = 0,
) -> list[tuple[int, float, float | None]]:
    """Median grid-index DBSCAN time per size on uniform data of constant density.

    Points cover [0, sqrt(n)]^2, so the density stays one point per unit area.

    Returns:
        (n, median seconds, ratio to the previous size or None)
    """
    params = DbscanParams(eps, min_pts)
    results = []
    previous = None
    for n in sizes:
        points = uniform_points(n, n**0.5, seed).points
        timings = []
        for _ in range(repetitions):
            start = time.perf_counter()
            dbscan(points, params)
            timings.append(time.perf_counter() - start)
        median = statistics.median(timings)
        results.append((n, median, median / previous if previous else None))
        previous = median
    return results


def write_resolved_configs(path: Path, configs: dict[str, Any]) -> None:
    """Write the configurations behind a bench CSV as one JSON object."""
    try:
        path.write_text(json.dumps(configs, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise DataIOError(f"Failed to write resolved configuration to {path}: {e}") from e


def write_bench_csv(path: Path, rows: list[dict], columns: Sequence[str] | None = None) -> None:
    columns = list(columns or (rows[0].keys() if rows else TABLE_COLUMNS))
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise DataIOError(f"Failed to write bench results to {path}: {e}") from e
