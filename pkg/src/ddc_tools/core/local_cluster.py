"""Local clustering backends run independently on every node.

DBSCAN comes in three flavours that differ only in how Eps-neighbourhoods
are found: a uniform grid index, a sparse thresholded distance matrix and
a brute-force scan. All three compare squared distances produced by the
same kernel against eps**2, then share one expansion routine, so their
labelings are identical.

K-Means is plain Lloyd iteration with a seeded farthest-point (or k-means++)
start.
"""

import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial.distance import cdist

from .exceptions import InvalidParamError, MemoryBudgetExceededError
from .validation import as_points, require_at_least, require_positive

logger = logging.getLogger(__name__)

NOISE = -1
UNCLASSIFIED = -2

DEFAULT_MAX_MATRIX_POINTS = 60_000
DEFAULT_KMEANS_MAX_ITER = 100
# Relative to the bbox diagonal of the clustered points
DEFAULT_KMEANS_TOL_FACTOR = 1e-6

# Upper bound on pairwise distances held in memory per block
_BLOCK_PAIRS = 4_000_000


class DbscanBackend(str, Enum):
    GRID_INDEX = "grid_index"
    DISTANCE_MATRIX = "distance_matrix"
    BRUTE_FORCE = "brute_force"


class KMeansInit(str, Enum):
    FARTHEST = "farthest"
    KMEANS_PP = "kmeans++"


@dataclass(frozen=True, eq=False)
class Labeling:
    """Per-point cluster ids with NOISE = -1.

    Cluster ids are contiguous 0..n_clusters-1 and every id is used.
    """

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(labels) and (labels.min() < NOISE or labels.max() >= self.n_clusters):
            raise InvalidParamError(
                f"labels must lie in [-1, {self.n_clusters - 1}], "
                f"got [{labels.min()}, {labels.max()}]"
            )
        used = np.unique(labels[labels != NOISE])
        if len(used) != self.n_clusters:
            raise InvalidParamError(
                f"n_clusters={self.n_clusters} but {len(used)} cluster ids are used"
            )
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels) -> "Labeling":
        """Build a labeling from arbitrary ids, renumbering clusters by first appearance.

        Any negative id is treated as noise.
        """
        raw = np.asarray(labels, dtype=np.int64).reshape(-1)
        out = np.full(len(raw), NOISE, dtype=np.int64)
        clustered = raw >= 0
        if clustered.any():
            values, first, inverse = np.unique(
                raw[clustered], return_index=True, return_inverse=True
            )
            rank = np.empty(len(values), dtype=np.int64)
            rank[np.argsort(first, kind="stable")] = np.arange(len(values))
            out[clustered] = rank[inverse]
            return cls(out, len(values))
        return cls(out, 0)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def noise_count(self) -> int:
        return int((self.labels == NOISE).sum())

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels != NOISE], minlength=self.n_clusters)

    def members(self, cluster_id: int) -> np.ndarray:
        return np.nonzero(self.labels == cluster_id)[0]


@dataclass(frozen=True)
class DbscanParams:
    """DBSCAN parameters.

    Attributes:
        eps: Neighbourhood radius
        min_pts: Minimum neighbourhood size (self included) of a core point
        backend: How neighbourhoods are computed
        max_matrix_points: Cap on n for the distance-matrix backend
    """

    eps: float
    min_pts: int
    backend: DbscanBackend = DbscanBackend.GRID_INDEX
    max_matrix_points: int = DEFAULT_MAX_MATRIX_POINTS

    def __post_init__(self):
        require_positive(self.eps, "eps")
        require_at_least(self.min_pts, 1, "min_pts")
        require_at_least(self.max_matrix_points, 1, "max_matrix_points")
        try:
            object.__setattr__(self, "backend", DbscanBackend(self.backend))
        except ValueError as e:
            choices = ", ".join(b.value for b in DbscanBackend)
            raise InvalidParamError(
                f"Unknown DBSCAN backend {self.backend!r} (choose from {choices})"
            ) from e


@dataclass(frozen=True)
class KMeansParams:
    """K-Means parameters.

    Attributes:
        k: Number of clusters
        max_iter: Maximum Lloyd iterations
        seed: Seed of the initialisation RNG
        tol: Stop once no centroid moves more than this (None: 1e-6 x bbox diagonal)
        init: Initialisation strategy
    """

    k: int
    max_iter: int = DEFAULT_KMEANS_MAX_ITER
    seed: int = 0
    tol: float | None = None
    init: KMeansInit = KMeansInit.FARTHEST

    def __post_init__(self):
        require_at_least(self.k, 1, "k")
        require_at_least(self.max_iter, 1, "max_iter")
        if self.tol is not None and (not math.isfinite(self.tol) or self.tol < 0):
            raise InvalidParamError(f"tol must be a finite number >= 0, got {self.tol!r}")
        try:
            object.__setattr__(self, "init", KMeansInit(self.init))
        except ValueError as e:
            choices = ", ".join(i.value for i in KMeansInit)
            raise InvalidParamError(
                f"Unknown K-Means init {self.init!r} (choose from {choices})"
            ) from e


@dataclass(frozen=True, eq=False)
class GridIndex:
    """Uniform grid over the plane.

    Attributes:
        cell_size: Side length of a cell
        cells: Integer cell coordinates -> ascending point ids in that cell
        point_cells: (n, 2) cell coordinates of every point
    """

    cell_size: float
    cells: dict[tuple[int, int], np.ndarray]
    point_cells: np.ndarray

    def __len__(self) -> int:
        return len(self.point_cells)

    def neighbour_ids(self, cell: tuple[int, int], reach: int = 1) -> np.ndarray:
        """Ascending ids of all points in the (2 * reach + 1)^2 block around a cell."""
        cx, cy = cell
        parts = [
            self.cells[key]
            for dx in range(-reach, reach + 1)
            for dy in range(-reach, reach + 1)
            if (key := (cx + dx, cy + dy)) in self.cells
        ]
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(parts))


@dataclass(frozen=True, eq=False)
class DbscanResult:
    """Full DBSCAN output.

    Attributes:
        labeling: Cluster labels
        core_mask: True for core points
        matrix_build_time: Seconds spent materialising the distance matrix (0 for other backends)
        cluster_time: Seconds spent on neighbourhood search and expansion
    """

    labeling: Labeling
    core_mask: np.ndarray
    matrix_build_time: float = 0.0
    cluster_time: float = 0.0


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labeling: Labeling
    centroids: np.ndarray
    inertia_history: list[float] = field(default_factory=list)
    n_iter: int = 0

    @property
    def inertia(self) -> float:
        return self.inertia_history[-1] if self.inertia_history else 0.0


# ---------------------------------------------------------------------------
# Neighbourhood search
# ---------------------------------------------------------------------------


def _squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of a and rows of b, shape (len(a), len(b))."""
    d = b[None, :, :] - a[:, None, :]
    return (d * d).sum(axis=-1)


def _rows_per_block(n_columns: int) -> int:
    return max(1, _BLOCK_PAIRS // max(1, n_columns))


def build_grid_index(points, cell_size: float) -> GridIndex:
    """Index points by the grid cell floor(coord / cell_size) they fall in.

    Raises:
        InvalidParamError: If cell_size is not a positive finite number
    """
    require_positive(cell_size, "cell_size")
    pts = as_points(points)
    if len(pts) == 0:
        return GridIndex(cell_size, {}, np.empty((0, 2), dtype=np.int64))

    keys = np.floor(pts / cell_size).astype(np.int64)
    order = np.lexsort((keys[:, 1], keys[:, 0]))
    sorted_keys = keys[order]
    breaks = np.nonzero(np.any(np.diff(sorted_keys, axis=0) != 0, axis=1))[0] + 1
    starts = np.concatenate([[0], breaks])
    cells = {
        (int(sorted_keys[s, 0]), int(sorted_keys[s, 1])): ids
        for s, ids in zip(starts, np.split(order, breaks))
    }
    return GridIndex(cell_size, cells, keys)


def _reach(index: GridIndex, eps: float) -> int:
    return max(1, math.ceil(eps / index.cell_size))


def region_query(index: GridIndex, points, center_id: int, eps: float) -> np.ndarray:
    """Ids of all points within eps of points[center_id], the centre included.

    Only the cells around the centre's cell are scanned; with cell_size = eps
    that is the 3 x 3 neighbourhood.
    """
    pts = as_points(points)
    cell = tuple(int(c) for c in index.point_cells[center_id])
    candidates = index.neighbour_ids(cell, _reach(index, eps))
    d2 = _squared_distances(pts[center_id : center_id + 1], pts[candidates])[0]
    return candidates[d2 <= eps * eps]


def _grid_neighbourhoods(pts: np.ndarray, eps: float) -> list[np.ndarray]:
    index = build_grid_index(pts, eps)
    reach = _reach(index, eps)
    eps2 = eps * eps
    neighbourhoods: list[np.ndarray] = [None] * len(pts)
    for cell, members in index.cells.items():
        candidates = index.neighbour_ids(cell, reach)
        within = _squared_distances(pts[members], pts[candidates]) <= eps2
        for row, pid in enumerate(members.tolist()):
            neighbourhoods[pid] = candidates[within[row]]
    return neighbourhoods


def _brute_force_neighbourhoods(pts: np.ndarray, eps: float) -> list[np.ndarray]:
    eps2 = eps * eps
    neighbourhoods = []
    step = _rows_per_block(len(pts))
    for start in range(0, len(pts), step):
        within = _squared_distances(pts[start : start + step], pts) <= eps2
        neighbourhoods.extend(np.nonzero(row)[0] for row in within)
    return neighbourhoods


def eps_distance_matrix(points, eps: float, max_points: int = DEFAULT_MAX_MATRIX_POINTS):
    """Sparse matrix of all pairwise distances <= eps.

    Every pair is evaluated block by block; only entries within eps are kept,
    including the zero diagonal.

    Raises:
        MemoryBudgetExceededError: If there are more than max_points points
    """
    pts = as_points(points)
    n = len(pts)
    if n > max_points:
        raise MemoryBudgetExceededError(n, max_points)

    eps2 = eps * eps
    indices, data, counts = [], [], []
    step = _rows_per_block(n)
    for start in range(0, n, step):
        d2 = _squared_distances(pts[start : start + step], pts)
        rows, cols = np.nonzero(d2 <= eps2)
        indices.append(cols)
        data.append(np.sqrt(d2[rows, cols]))
        counts.append(np.bincount(rows, minlength=d2.shape[0]))

    if n == 0:
        return csr_matrix((0, 0))
    indptr = np.concatenate([[0], np.cumsum(np.concatenate(counts))])
    return csr_matrix(
        (np.concatenate(data), np.concatenate(indices), indptr), shape=(n, n)
    )


# ---------------------------------------------------------------------------
# DBSCAN
# ---------------------------------------------------------------------------


def _expand_clusters(neighbourhoods: list[np.ndarray], min_pts: int) -> tuple[Labeling, np.ndarray]:
    """Canonical DBSCAN expansion over precomputed Eps-neighbourhoods.

    Seeds are visited in ascending id order, so cluster ids follow discovery
    order; a border point joins the first cluster that reaches it.
    """
    n = len(neighbourhoods)
    core = np.fromiter((len(nb) >= min_pts for nb in neighbourhoods), dtype=bool, count=n)
    labels = np.full(n, UNCLASSIFIED, dtype=np.int64)
    cluster = 0
    for seed in range(n):
        if labels[seed] != UNCLASSIFIED:
            continue
        if not core[seed]:
            labels[seed] = NOISE
            continue

        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            q = queue.popleft()
            if not core[q]:
                continue
            nb = neighbourhoods[q]
            current = labels[nb]
            fresh = nb[current == UNCLASSIFIED]
            labels[fresh] = cluster
            labels[nb[current == NOISE]] = cluster
            queue.extend(fresh.tolist())
        cluster += 1

    return Labeling(labels, cluster), core


def dbscan_with_cores(points, params: DbscanParams) -> DbscanResult:
    """Run DBSCAN and return labels, the core-point mask and timings.

    Raises:
        MemoryBudgetExceededError: distance_matrix backend above its point cap
    """
    pts = as_points(points)
    build_time = 0.0
    start = time.perf_counter()

    if params.backend is DbscanBackend.DISTANCE_MATRIX:
        matrix = eps_distance_matrix(pts, params.eps, params.max_matrix_points)
        build_time = time.perf_counter() - start
        start = time.perf_counter()
        neighbourhoods = [
            matrix.indices[matrix.indptr[i] : matrix.indptr[i + 1]] for i in range(len(pts))
        ]
    elif params.backend is DbscanBackend.BRUTE_FORCE:
        neighbourhoods = _brute_force_neighbourhoods(pts, params.eps)
    else:
        neighbourhoods = _grid_neighbourhoods(pts, params.eps)

    labeling, core = _expand_clusters(neighbourhoods, params.min_pts)
    cluster_time = time.perf_counter() - start
    logger.debug(
        "dbscan[%s] n=%d eps=%g min_pts=%d -> %d clusters, %d noise",
        params.backend.value,
        len(pts),
        params.eps,
        params.min_pts,
        labeling.n_clusters,
        labeling.noise_count,
    )
    return DbscanResult(labeling, core, build_time, cluster_time)


def dbscan(points, params: DbscanParams) -> Labeling:
    """DBSCAN labeling of a 2D point set."""
    return dbscan_with_cores(points, params).labeling


def dbscan_distance_matrix(points, params: DbscanParams) -> tuple[Labeling, float, float]:
    """DBSCAN through the distance-matrix backend.

    Returns:
        (labeling, matrix_build_time, cluster_time), times in seconds
    """
    if params.backend is not DbscanBackend.DISTANCE_MATRIX:
        params = DbscanParams(
            params.eps, params.min_pts, DbscanBackend.DISTANCE_MATRIX, params.max_matrix_points
        )
    result = dbscan_with_cores(points, params)
    return result.labeling, result.matrix_build_time, result.cluster_time


# ---------------------------------------------------------------------------
# K-Means
# ---------------------------------------------------------------------------


def _initial_centres(pts: np.ndarray, k: int, init: KMeansInit, rng: np.random.Generator) -> np.ndarray:
    centres = np.empty((k, 2), dtype=np.float64)
    centres[0] = pts[rng.integers(len(pts))]
    closest = cdist(pts, centres[:1], "sqeuclidean")[:, 0]
    for j in range(1, k):
        if init is KMeansInit.KMEANS_PP and closest.sum() > 0:
            pick = rng.choice(len(pts), p=closest / closest.sum())
        else:
            pick = int(np.argmax(closest))
        centres[j] = pts[pick]
        closest = np.minimum(closest, cdist(pts, centres[j : j + 1], "sqeuclidean")[:, 0])
    return centres


def _reseed_empty(pts: np.ndarray, labels: np.ndarray, cost: np.ndarray, centres: np.ndarray, k: int) -> None:
    """Move each empty centre onto the point farthest from its own centroid."""
    counts = np.bincount(labels, minlength=k)
    cost = cost.copy()
    for j in np.nonzero(counts == 0)[0]:
        far = int(np.argmax(cost))
        centres[j] = pts[far]
        labels[far] = j
        cost[far] = -1.0


def kmeans_fit(points, params: KMeansParams) -> KMeansResult:
    """Lloyd's K-Means with deterministic seeded initialisation.

    Clusters are numbered by lexicographic order of their final centroids.

    Raises:
        InvalidParamError: If k exceeds the number of distinct points
    """
    pts = as_points(points)
    n_distinct = len(np.unique(pts, axis=0)) if len(pts) else 0
    if params.k > n_distinct:
        raise InvalidParamError(f"k={params.k} exceeds the {n_distinct} distinct points")

    k = params.k
    tol = params.tol
    if tol is None:
        tol = DEFAULT_KMEANS_TOL_FACTOR * float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))

    rng = np.random.default_rng(params.seed)
    centres = _initial_centres(pts, k, params.init, rng)
    history: list[float] = []
    rows = np.arange(len(pts))
    n_iter = 0

    for n_iter in range(1, params.max_iter + 1):
        d2 = cdist(pts, centres, "sqeuclidean")
        labels = np.argmin(d2, axis=1)
        cost = d2[rows, labels]
        history.append(float(cost.sum()))

        counts = np.bincount(labels, minlength=k)
        updated = centres.copy()
        filled = counts > 0
        for axis in (0, 1):
            sums = np.bincount(labels, weights=pts[:, axis], minlength=k)
            updated[filled, axis] = sums[filled] / counts[filled]
        if not filled.all():
            _reseed_empty(pts, labels, cost, updated, k)

        shift = float(np.max(np.linalg.norm(updated - centres, axis=1)))
        centres = updated
        if shift <= tol:
            break

    d2 = cdist(pts, centres, "sqeuclidean")
    labels = np.argmin(d2, axis=1)
    if np.bincount(labels, minlength=k).min() == 0:
        _reseed_empty(pts, labels, d2[rows, labels], centres, k)
    history.append(float(((pts - centres[labels]) ** 2).sum()))

    order = np.lexsort((centres[:, 1], centres[:, 0]))
    rank = np.empty(k, dtype=np.int64)
    rank[order] = np.arange(k)
    logger.debug("kmeans k=%d n=%d converged after %d iterations", k, len(pts), n_iter)
    return KMeansResult(Labeling(rank[labels], k), centres[order], history, n_iter)


def kmeans(points, params: KMeansParams) -> Labeling:
    """K-Means labeling of a 2D point set."""
    return kmeans_fit(points, params).labeling
