"""Configuration for DDC runs.

RunConfig is assembled from three sources, later ones winning: the run
block of a preset, a JSON config file, and command-line flags. Every field
carries an explicit default so the resolved configuration can be written
out and replayed.
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any

from ddc_tools.core.data import PartitionStrategy, load_preset
from ddc_tools.core.exceptions import ConfigurationError, DataIOError, InvalidParamError
from ddc_tools.core.geometry import Contour
from ddc_tools.core.local_cluster import DbscanParams, KMeansParams
from ddc_tools.core.validation import require_unit_interval
from ddc_tools.engine.constants import (
    DEFAULT_BACKEND,
    DEFAULT_DBSCAN_BACKEND,
    DEFAULT_DEGREE,
    DEFAULT_KMEANS_MAX_ITER,
    DEFAULT_LAMBDA_NORM,
    DEFAULT_MAX_MATRIX_POINTS,
    DEFAULT_MAX_THREADS,
    DEFAULT_N_NODES,
    DEFAULT_PARTITION,
    DEFAULT_SEED,
    MAX_THREADS,
)

AUTO = "auto"


class Backend(str, Enum):
    DBSCAN = "dbscan"
    KMEANS = "kmeans"


class MergeKind(str, Enum):
    POLYGON_OVERLAP = "polygon_overlap"
    BOUNDARY_PROXIMITY = "boundary_proximity"


def _enum(enum_cls, value, what: str):
    try:
        return enum_cls(value)
    except ValueError as e:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigurationError(f"Unknown {what} {value!r} (choose from {choices})") from e


@dataclass(frozen=True)
class NodeParams:
    """Clustering parameters of one node; exactly one parameter set is present."""

    node_id: int
    backend: Backend
    dbscan: DbscanParams | None = None
    kmeans: KMeansParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "backend", _enum(Backend, self.backend, "backend"))
        if (self.dbscan is None) == (self.kmeans is None):
            raise ConfigurationError(
                f"Node {self.node_id} needs exactly one of dbscan/kmeans parameters"
            )
        if self.backend is Backend.DBSCAN and self.dbscan is None:
            raise ConfigurationError(f"Node {self.node_id} uses dbscan but has no dbscan params")
        if self.backend is Backend.KMEANS and self.kmeans is None:
            raise ConfigurationError(f"Node {self.node_id} uses kmeans but has no kmeans params")

    @property
    def params(self) -> DbscanParams | KMeansParams:
        return self.dbscan if self.dbscan is not None else self.kmeans

    @property
    def eps_hint(self) -> float | None:
        return self.dbscan.eps if self.dbscan is not None else None


@dataclass(frozen=True)
class TopologyConfig:
    """Shape of the aggregation tree.

    Attributes:
        n_nodes: Leaf count
        degree: Maximum group size at every level
    """

    n_nodes: int = DEFAULT_N_NODES
    degree: int = DEFAULT_DEGREE

    def __post_init__(self):
        if isinstance(self.n_nodes, bool) or not isinstance(self.n_nodes, int) or self.n_nodes < 1:
            raise ConfigurationError(f"n_nodes must be an integer >= 1, got {self.n_nodes!r}")
        if isinstance(self.degree, bool) or not isinstance(self.degree, int) or self.degree < 2:
            raise ConfigurationError(f"degree must be an integer >= 2, got {self.degree!r}")

    @property
    def levels(self) -> int:
        """Tree height, ceil(log_degree(n_nodes)), computed without floating point."""
        levels, remaining = 0, self.n_nodes
        while remaining > 1:
            remaining = -(-remaining // self.degree)
            levels += 1
        return levels

    def groups(self, members: list[int]) -> list[list[int]]:
        """Split one level's nodes into consecutive groups of at most `degree`."""
        ordered = sorted(members)
        return [ordered[i : i + self.degree] for i in range(0, len(ordered), self.degree)]


@dataclass(frozen=True)
class MergePolicy:
    """When two contours belong to the same global cluster.

    Attributes:
        kind: polygon_overlap or boundary_proximity
        proximity_eps: Vertex distance bound, or "auto" for the larger eps_hint of the pair
        density_gate: If set, densities may differ by at most this ratio
    """

    kind: MergeKind = MergeKind.BOUNDARY_PROXIMITY
    proximity_eps: float | str = AUTO
    density_gate: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _enum(MergeKind, self.kind, "merge policy"))
        if self.proximity_eps != AUTO:
            eps = self.proximity_eps
            if isinstance(eps, bool) or not isinstance(eps, (int, float)) or not (
                math.isfinite(eps) and eps > 0
            ):
                raise ConfigurationError(
                    f"proximity_eps must be a number > 0 or 'auto', got {eps!r}"
                )
        gate = self.density_gate
        if gate is not None and (not isinstance(gate, (int, float)) or not gate >= 1.0):
            raise ConfigurationError(f"density_gate must be >= 1 or disabled, got {gate!r}")

    @classmethod
    def default_for(cls, backend: Backend | str) -> "MergePolicy":
        """Proximity for DBSCAN runs, plain polygon overlap for K-Means runs."""
        if _enum(Backend, backend, "backend") is Backend.KMEANS:
            return cls(MergeKind.POLYGON_OVERLAP)
        return cls(MergeKind.BOUNDARY_PROXIMITY)

    def resolve_eps(self, a: Contour, b: Contour) -> float:
        if self.proximity_eps != AUTO:
            return float(self.proximity_eps)
        hints = [c.eps_hint for c in (a, b) if c.eps_hint is not None]
        if not hints:
            raise ConfigurationError(
                "proximity_eps='auto' needs contours produced by DBSCAN; set a number instead"
            )
        return max(hints)

    def passes_density_gate(self, a: Contour, b: Contour) -> bool:
        if self.density_gate is None:
            return True
        low, high = sorted((a.density, b.density))
        return high <= self.density_gate * low

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "proximity_eps": self.proximity_eps,
            "density_gate": self.density_gate,
        }


@dataclass
class RunConfig:
    """Everything needed to reproduce one DDC run.

    Attributes:
        preset: Bundled dataset preset name (used when dataset is None)
        dataset: Point CSV or dataset spec JSON path
        n_nodes: Number of leaf nodes
        degree: Aggregation tree degree
        partition: spatial_grid, random or round_robin
        backend: dbscan or kmeans
        eps: DBSCAN radius
        min_pts: DBSCAN minimum neighbourhood size
        dbscan_backend: grid_index, distance_matrix or brute_force
        max_matrix_points: Point cap of the distance-matrix backend
        k: K-Means cluster count per node; None = expected clusters + 1
        max_iter: K-Means iteration cap
        kmeans_init: farthest or kmeans++
        lambda_norm: Characteristic-shape parameter
        policy: Merge predicate kind; None = backend default
        proximity_eps: Number or "auto"
        density_gate: Density ratio bound or None
        seed: Seed for generation, partitioning and K-Means
        threads: Worker threads for node tasks
        expected_clusters: Known cluster count (for automatic k)
        node_overrides: Per-node {"eps", "min_pts", "k"} overrides keyed by node id
        out: Output directory
    """

    preset: str | None = None
    dataset: str | None = None
    n_nodes: int = DEFAULT_N_NODES
    degree: int = DEFAULT_DEGREE
    partition: str = DEFAULT_PARTITION
    backend: str = DEFAULT_BACKEND
    eps: float | None = None
    min_pts: int | None = None
    dbscan_backend: str = DEFAULT_DBSCAN_BACKEND
    max_matrix_points: int = DEFAULT_MAX_MATRIX_POINTS
    k: int | None = None
    max_iter: int = DEFAULT_KMEANS_MAX_ITER
    kmeans_init: str = "farthest"
    lambda_norm: float = DEFAULT_LAMBDA_NORM
    policy: str | None = None
    proximity_eps: float | str = AUTO
    density_gate: float | None = None
    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_MAX_THREADS
    expected_clusters: int | None = None
    node_overrides: dict[str, dict[str, Any]] = field(default_factory=dict)
    out: str | None = None

    def __post_init__(self):
        """Validate configuration values."""
        _enum(Backend, self.backend, "backend")
        _enum(PartitionStrategy, self.partition, "partition strategy")
        if self.policy is not None:
            _enum(MergeKind, self.policy, "merge policy")
        require_unit_interval(self.lambda_norm, "lambda_norm")
        if not 1 <= self.threads <= MAX_THREADS:
            raise ConfigurationError(f"threads must be between 1 and {MAX_THREADS}, got {self.threads}")
        # Constructing these validates n_nodes, degree and the policy fields
        TopologyConfig(self.n_nodes, self.degree)
        MergePolicy(self.policy or MergeKind.BOUNDARY_PROXIMITY, self.proximity_eps, self.density_gate)

        for key, override in self.node_overrides.items():
            try:
                node = int(key)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"node_overrides key {key!r} is not a node id") from e
            if not 0 <= node < self.n_nodes:
                raise ConfigurationError(f"node_overrides refers to node {node} of {self.n_nodes}")
            unknown = set(override) - {"eps", "min_pts", "k"}
            if unknown:
                raise ConfigurationError(
                    f"node_overrides[{key}] has unknown keys: {', '.join(sorted(unknown))}"
                )

    @property
    def topology(self) -> TopologyConfig:
        return TopologyConfig(self.n_nodes, self.degree)

    @property
    def merge_policy(self) -> MergePolicy:
        kind = self.policy or MergePolicy.default_for(self.backend).kind
        return MergePolicy(kind, self.proximity_eps, self.density_gate)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def merged(self, overrides: dict[str, Any]) -> "RunConfig":
        """Copy with the given fields replaced; None values are ignored."""
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("Run configuration must be a JSON object")
        return (base or cls(preset=data.get("preset"))).merged(data)


def node_params_for(config: RunConfig, node_id: int) -> NodeParams:
    """Resolve one node's parameters: uniform settings plus its override, if any.

    K-Means nodes get k = expected_clusters + 1 when k is not set, so every
    node has more local clusters than true clusters and none spans two of them.
    """
    override = config.node_overrides.get(str(node_id), {})
    if config.backend == Backend.KMEANS.value:
        k = override.get("k", config.k)
        if k is None:
            if config.expected_clusters is None:
                raise ConfigurationError(
                    "K-Means needs k, or a dataset with a known cluster count for automatic k"
                )
            k = config.expected_clusters + 1
        params = KMeansParams(
            k=k,
            max_iter=config.max_iter,
            seed=config.seed + node_id,
            init=config.kmeans_init,
        )
        return NodeParams(node_id, Backend.KMEANS, kmeans=params)

    eps = override.get("eps", config.eps)
    min_pts = override.get("min_pts", config.min_pts)
    if eps is None or min_pts is None:
        raise InvalidParamError("DBSCAN needs eps and min_pts (set them or use a preset)")
    params = DbscanParams(eps, min_pts, config.dbscan_backend, config.max_matrix_points)
    return NodeParams(node_id, Backend.DBSCAN, dbscan=params)


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a run configuration JSON object.

    Raises:
        DataIOError: If the file cannot be read
        ConfigurationError: If it is not a JSON object
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise DataIOError(
            f"Failed to read config {path}: {e}", user_message=f"Cannot read config file: {path}"
        ) from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must hold a JSON object")
    return data


def resolve_run_config(
    preset: str | None = None,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Build a RunConfig from preset defaults, a config file and flag overrides.

    The preset may be named by the flags or by the config file; flags win.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    file_data = load_config_file(config_path) if config_path is not None else {}

    preset = preset or overrides.get("preset") or file_data.get("preset")
    config = RunConfig()
    if preset:
        document = load_preset(preset)
        run_block = dict(document.get("run", {}))
        run_block["preset"] = preset
        run_block.setdefault("expected_clusters", len(document["dataset"]["shapes"]))
        config = config.merged(run_block)
    config = RunConfig.from_dict(file_data, base=config)
    return config.merged(overrides).merged({"preset": preset})
