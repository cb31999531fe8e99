"""The two-phase DDC simulator.

Phase one: every leaf node clusters its fragment and reduces each local
cluster to a contour. Phase two: level by level, nodes form groups of
`degree` consecutive ids, the group's leader (smallest id) collects the
members' contours and merges overlapping ones until none overlap. The
last surviving model holds the global clusters.

Nodes are simulated in one process. Communication is accounted as the
serialised size of the contours members send to their leader; time is
accounted as the slowest leaf plus the slowest group of every level.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ddc_tools.core.data import Dataset, DatasetFragment, PartitionStrategy, partition
from ddc_tools.core.exceptions import ConfigurationError, EmptyFragmentError, EmptyGroupError
from ddc_tools.core.geometry import (
    Contour,
    Location,
    classify_points,
    make_contour,
    merge_contours,
    min_vertex_distance,
    polygons_intersect,
    serialized_size,
)
from ddc_tools.core.local_cluster import NOISE, Labeling, dbscan_with_cores, kmeans
from ddc_tools.engine.config import MergeKind, MergePolicy, NodeParams, TopologyConfig
from ddc_tools.engine.constants import DEFAULT_LAMBDA_NORM, DEFAULT_MAX_THREADS
from ddc_tools.engine.node_queue import NodeTaskQueue

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NodeTiming:
    """Seconds spent by one node task.

    Attributes:
        total: Whole task, matrix build included
        cluster: Neighbourhood search and cluster expansion (or Lloyd iterations)
        matrix_build: Distance-matrix materialisation (distance_matrix backend only)
        contour: Contour extraction or merging
    """

    total: float
    cluster: float = 0.0
    matrix_build: float = 0.0
    contour: float = 0.0

    @property
    def without_matrix(self) -> float:
        return self.total - self.matrix_build


@dataclass(frozen=True, eq=False)
class LocalModel:
    """Contours held by one node."""

    node_id: int
    contours: tuple[Contour, ...]
    timing: NodeTiming
    bytes_estimate: int
    n_points: int = 0
    n_noise: int = 0

    @property
    def n_vertices(self) -> int:
        return sum(c.n_vertices for c in self.contours)


@dataclass(frozen=True)
class MergeRecord:
    """What happened in one group at one level."""

    level: int
    group: tuple[int, ...]
    leader: int
    contours_in: int
    contours_out: int
    overlaps: int
    bytes: int
    seconds: float = 0.0

    def to_dict(self) -> dict:
        """JSON-lines form; timings are left out so traces are reproducible."""
        return {
            "level": self.level,
            "group": list(self.group),
            "leader": self.leader,
            "contours_in": self.contours_in,
            "contours_out": self.contours_out,
            "overlaps": self.overlaps,
            "bytes": self.bytes,
        }


@dataclass(frozen=True, eq=False)
class GlobalModel:
    """Result of a DDC run.

    Attributes:
        contours: The global clusters
        merge_trace: One record per group per level
        local_models: Leaf models, in node order
        leaf_makespan: Slowest leaf task
        merge_time: Sum over levels of the slowest group merge
        makespan: leaf_makespan + merge_time
        makespan_without_matrix: Same, leaves counted without matrix build time
        total_bytes: Bytes sent to leaders over all levels
    """

    contours: tuple[Contour, ...]
    merge_trace: tuple[MergeRecord, ...] = ()
    local_models: tuple[LocalModel, ...] = ()
    leaf_makespan: float = 0.0
    merge_time: float = 0.0
    makespan: float = 0.0
    makespan_without_matrix: float = 0.0
    total_bytes: int = 0

    @property
    def n_clusters(self) -> int:
        return len(self.contours)

    @property
    def levels(self) -> int:
        return max((r.level for r in self.merge_trace), default=0)

    def merge_trace_records(self) -> list[dict]:
        return [record.to_dict() for record in self.merge_trace]

    def level_summary(self) -> list[dict]:
        """Per level: groups, overlaps found, merges applied and bytes exchanged."""
        summary = []
        for level in range(1, self.levels + 1):
            records = [r for r in self.merge_trace if r.level == level]
            summary.append(
                {
                    "level": level,
                    "groups": len(records),
                    "overlaps": sum(r.overlaps for r in records),
                    "merges": sum(r.contours_in - r.contours_out for r in records),
                    "bytes": sum(r.bytes for r in records),
                    "seconds": max(r.seconds for r in records),
                }
            )
        return summary


# ---------------------------------------------------------------------------
# Phase one
# ---------------------------------------------------------------------------


def _diagonal(points: np.ndarray) -> float:
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def run_local_phase(
    fragment: DatasetFragment,
    params: NodeParams,
    lambda_norm: float = DEFAULT_LAMBDA_NORM,
) -> LocalModel:
    """Cluster one fragment and reduce every local cluster to a contour.

    Noise points get no representative.

    Raises:
        EmptyFragmentError: If the fragment holds no points
    """
    if len(fragment) == 0:
        raise EmptyFragmentError(fragment.node_id)

    points = fragment.points
    start = time.perf_counter()
    matrix_build = 0.0
    if params.dbscan is not None:
        result = dbscan_with_cores(points, params.dbscan)
        labeling = result.labeling
        matrix_build = result.matrix_build_time
    else:
        labeling = kmeans(points, params.kmeans)
    clustered = time.perf_counter()

    scale = _diagonal(points)
    contours = tuple(
        make_contour(
            points[labeling.members(cid)],
            lambda_norm,
            source_node=fragment.node_id,
            eps_hint=params.eps_hint,
            scale=scale,
        )
        for cid in range(labeling.n_clusters)
    )
    done = time.perf_counter()

    timing = NodeTiming(
        total=done - start,
        cluster=clustered - start - matrix_build,
        matrix_build=matrix_build,
        contour=done - clustered,
    )
    logger.debug(
        "node %d: %d points -> %d contours (%d vertices) in %.3fs",
        fragment.node_id,
        len(fragment),
        len(contours),
        sum(c.n_vertices for c in contours),
        timing.total,
    )
    return LocalModel(
        node_id=fragment.node_id,
        contours=contours,
        timing=timing,
        bytes_estimate=serialized_size(contours),
        n_points=len(fragment),
        n_noise=labeling.noise_count,
    )


# ---------------------------------------------------------------------------
# Phase two
# ---------------------------------------------------------------------------


def elect_leader(group: Sequence[int]) -> int:
    """Leader of a group: its smallest node id.

    Raises:
        EmptyGroupError: If the group is empty
    """
    if not group:
        raise EmptyGroupError("Cannot elect a leader from an empty group")
    return min(group)


def _bbox_gaps(contours: Sequence[Contour]) -> np.ndarray:
    """Pairwise Euclidean gaps between contour bounding boxes (0 when they touch)."""
    boxes = np.array([c.polygon.bounds for c in contours])
    xmin, ymin, xmax, ymax = (boxes[:, i] for i in range(4))
    dx = np.maximum(0.0, np.maximum(xmin[None, :] - xmax[:, None], xmin[:, None] - xmax[None, :]))
    dy = np.maximum(0.0, np.maximum(ymin[None, :] - ymax[:, None], ymin[:, None] - ymax[None, :]))
    return np.hypot(dx, dy)


def _linked(a: Contour, b: Contour, policy: MergePolicy) -> bool:
    if policy.kind is MergeKind.BOUNDARY_PROXIMITY:
        linked = min_vertex_distance(a.polygon, b.polygon) <= policy.resolve_eps(a, b)
    else:
        linked = polygons_intersect(a.polygon, b.polygon)
    return linked and policy.passes_density_gate(a, b)


def find_overlaps(contours: Sequence[Contour], policy: MergePolicy) -> list[list[int]]:
    """Connected components of the graph linking contours that satisfy the policy.

    Returns:
        Index lists (ascending), singletons included, ordered by smallest index
    """
    n = len(contours)
    if n == 0:
        return []

    gaps = _bbox_gaps(contours)
    if policy.kind is MergeKind.BOUNDARY_PROXIMITY:
        if policy.proximity_eps == "auto":
            hints = [c.eps_hint for c in contours if c.eps_hint is not None]
            reach = max(hints) if hints else np.inf
        else:
            reach = float(policy.proximity_eps)
    else:
        reach = 1e-9 * max(c.polygon.diagonal for c in contours)

    rows, cols = [], []
    for i, j in zip(*np.nonzero(np.triu(gaps <= reach, k=1))):
        if _linked(contours[i], contours[j], policy):
            rows.append(i)
            cols.append(j)

    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, component_of = connected_components(graph, directed=False)
    components: dict[int, list[int]] = {}
    for index, label in enumerate(component_of.tolist()):
        components.setdefault(label, []).append(index)
    return sorted(components.values(), key=lambda members: members[0])


def _merge_to_fixpoint(
    contours: list[Contour], policy: MergePolicy, lambda_norm: float, leader: int
) -> tuple[list[Contour], int]:
    overlaps = 0
    while True:
        components = find_overlaps(contours, policy)
        if all(len(c) == 1 for c in components):
            return contours, overlaps
        overlaps += sum(1 for c in components if len(c) > 1)
        contours = [
            merge_contours([contours[i] for i in comp], lambda_norm, source_node=leader)
            if len(comp) > 1
            else contours[comp[0]]
            for comp in components
        ]


def _merge(models: Sequence[LocalModel], policy: MergePolicy, lambda_norm: float, level: int):
    start = time.perf_counter()
    ordered = sorted(models, key=lambda m: m.node_id)
    leader = elect_leader([m.node_id for m in ordered])
    gathered = [c for m in ordered for c in m.contours]
    sent = sum(m.bytes_estimate for m in ordered if m.node_id != leader)

    merged, overlaps = _merge_to_fixpoint(gathered, policy, lambda_norm, leader)
    elapsed = time.perf_counter() - start
    model = LocalModel(
        node_id=leader,
        contours=tuple(merged),
        timing=NodeTiming(total=elapsed, contour=elapsed),
        bytes_estimate=serialized_size(merged),
        n_points=sum(m.n_points for m in ordered),
        n_noise=sum(m.n_noise for m in ordered),
    )
    record = MergeRecord(
        level=level,
        group=tuple(m.node_id for m in ordered),
        leader=leader,
        contours_in=len(gathered),
        contours_out=len(merged),
        overlaps=overlaps,
        bytes=sent,
        seconds=elapsed,
    )
    return model, record


def merge_group(
    models: Sequence[LocalModel],
    policy: MergePolicy,
    lambda_norm: float = DEFAULT_LAMBDA_NORM,
) -> LocalModel:
    """Leader-side merge: repeat overlap detection and merging until nothing overlaps.

    Raises:
        EmptyGroupError: If models is empty
    """
    if not models:
        raise EmptyGroupError("Cannot merge an empty group")
    model, _ = _merge(models, policy, lambda_norm, level=0)
    return model


def run_ddc(
    dataset: Dataset,
    topology: TopologyConfig,
    node_params: Sequence[NodeParams],
    policy: MergePolicy,
    lambda_norm: float = DEFAULT_LAMBDA_NORM,
    partition_strategy: PartitionStrategy | str = PartitionStrategy.SPATIAL_GRID,
    seed: int = 0,
    threads: int = DEFAULT_MAX_THREADS,
) -> GlobalModel:
    """Run both DDC phases over a simulated tree of nodes.

    Args:
        dataset: Points to cluster
        topology: Node count and tree degree
        node_params: One NodeParams per node, in node id order
        policy: Merge predicate
        lambda_norm: Characteristic-shape parameter
        partition_strategy: How points are dealt to nodes
        seed: Seed of the random partition
        threads: Worker threads for node tasks

    Raises:
        ConfigurationError: If node_params does not match the topology
    """
    if len(node_params) != topology.n_nodes:
        raise ConfigurationError(
            f"Got parameters for {len(node_params)} nodes, topology has {topology.n_nodes}"
        )
    if [p.node_id for p in node_params] != list(range(topology.n_nodes)):
        raise ConfigurationError("node_params must be ordered by node id 0..n_nodes-1")

    fragments = partition(dataset, topology.n_nodes, partition_strategy, seed)
    queue = NodeTaskQueue(max_concurrent=threads)

    leaves = queue.map(
        lambda task: run_local_phase(task[0], task[1], lambda_norm),
        list(zip(fragments, node_params)),
    )
    leaf_makespan = max(m.timing.total for m in leaves)
    leaf_without_matrix = max(m.timing.without_matrix for m in leaves)
    logger.info(
        "local phase: %d nodes, %d contours, makespan %.3fs",
        len(leaves),
        sum(len(m.contours) for m in leaves),
        leaf_makespan,
    )

    current = {m.node_id: m for m in leaves}
    trace: list[MergeRecord] = []
    merge_time = 0.0
    level = 0
    while len(current) > 1:
        level += 1
        groups = topology.groups(list(current))
        results = queue.map(
            lambda group: _merge([current[i] for i in group], policy, lambda_norm, level),
            groups,
        )
        merge_time += max(record.seconds for _, record in results)
        trace.extend(record for _, record in results)
        current = {model.node_id: model for model, _ in results}
        logger.debug(
            "level %d: %d groups, %d contours remain",
            level,
            len(groups),
            sum(len(m.contours) for m in current.values()),
        )

    root = next(iter(current.values()))
    return GlobalModel(
        contours=root.contours,
        merge_trace=tuple(trace),
        local_models=tuple(leaves),
        leaf_makespan=leaf_makespan,
        merge_time=merge_time,
        makespan=leaf_makespan + merge_time,
        makespan_without_matrix=leaf_without_matrix + merge_time,
        total_bytes=sum(r.bytes for r in trace),
    )


def assign_points(model: GlobalModel, dataset: Dataset) -> Labeling:
    """Label every point by the global contour containing it.

    Points inside (or on) several contours go to the densest one; points
    inside none are NOISE. Cluster ids follow contour order, skipping
    contours that end up with no points.
    """
    n = len(dataset)
    labels = np.full(n, NOISE, dtype=np.int64)
    unassigned = np.ones(n, dtype=bool)
    order = sorted(range(model.n_clusters), key=lambda i: (-model.contours[i].density, i))
    for cid in order:
        candidates = np.nonzero(unassigned)[0]
        if len(candidates) == 0:
            break
        codes = classify_points(dataset.points[candidates], model.contours[cid].polygon)
        hit = candidates[codes != Location.OUTSIDE]
        labels[hit] = cid
        unassigned[hit] = False

    used = np.unique(labels[labels != NOISE])
    compact = labels.copy()
    clustered = labels != NOISE
    compact[clustered] = np.searchsorted(used, labels[clustered])
    return Labeling(compact, len(used))
