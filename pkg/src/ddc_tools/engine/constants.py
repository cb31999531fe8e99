"""Constants for the DDC simulator."""

from ddc_tools.core.geometry import DEFAULT_LAMBDA_NORM
from ddc_tools.core.local_cluster import DEFAULT_KMEANS_MAX_ITER, DEFAULT_MAX_MATRIX_POINTS

# Topology Defaults
DEFAULT_N_NODES = 5
DEFAULT_DEGREE = 2

# Worker Pool
DEFAULT_MAX_THREADS = 4
MAX_THREADS = 64

# Run Defaults
DEFAULT_PARTITION = "spatial_grid"
DEFAULT_BACKEND = "dbscan"
DEFAULT_DBSCAN_BACKEND = "grid_index"
DEFAULT_SEED = 0
DEFAULT_OUTPUT_DIR = "ddc_output"

# Bench Defaults
DEFAULT_BENCH_REPETITIONS = 3
DEFAULT_SCALABILITY_MAX_NODES = 64
SCALABILITY_PRESET = "scale"


# Output Artifacts
class Artifacts:
    """File names written into a run's output directory."""

    CONTOURS = "contours.wkt"
    ASSIGNMENTS = "assignments.csv"
    MERGE_TRACE = "merge_trace.jsonl"
    REPORT = "report.json"
    RESOLVED_CONFIG = "resolved_config.json"
    POINTS = "points.csv"
    BENCH = "bench.csv"
    SCALABILITY = "scalability.csv"


__all__ = [
    "DEFAULT_LAMBDA_NORM",
    "DEFAULT_KMEANS_MAX_ITER",
    "DEFAULT_MAX_MATRIX_POINTS",
    "DEFAULT_N_NODES",
    "DEFAULT_DEGREE",
    "DEFAULT_MAX_THREADS",
    "MAX_THREADS",
    "DEFAULT_PARTITION",
    "DEFAULT_BACKEND",
    "DEFAULT_DBSCAN_BACKEND",
    "DEFAULT_SEED",
    "DEFAULT_OUTPUT_DIR",
    "DEFAULT_BENCH_REPETITIONS",
    "DEFAULT_SCALABILITY_MAX_NODES",
    "SCALABILITY_PRESET",
    "Artifacts",
]
