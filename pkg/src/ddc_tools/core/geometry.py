"""2D computational geometry for cluster contours.

Delaunay triangulation comes from scipy (Qhull). On top of it this module
builds the characteristic shape of a point set: starting from the convex
hull, the longest boundary edges are removed one triangle at a time while
the boundary stays a single simple ring. The resulting polygon is what a
node ships to its leader instead of the raw points.

Polygons are stored as counter-clockwise (n, 2) float arrays without a
repeated closing vertex.
"""

import heapq
import logging
import math
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError
from scipy.spatial.distance import cdist

from .exceptions import DataIOError, DegenerateInputError, InvalidParamError, ParseError
from .validation import as_points, require_unit_interval

logger = logging.getLogger(__name__)

Point2D = tuple[float, float]

DEFAULT_LAMBDA_NORM = 0.3
# Tolerances relative to the bounding-box diagonal of the geometry involved
GEO_TOLERANCE = 1e-9
DEGENERATE_HALF_SIDE = 1e-6
WKT_SIGNIFICANT_DIGITS = 9

# Relative error bound of the floating-point orientation determinant
_ORIENTATION_ERRBOUND = 8 * np.finfo(np.float64).eps
# Cap on point x edge pairs evaluated at once in vectorised predicates
_MAX_PAIRS_PER_CHUNK = 2_000_000


class Location(IntEnum):
    """Position of a point relative to a polygon."""

    OUTSIDE = 0
    INSIDE = 1
    ON_BOUNDARY = 2


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Delaunay triangulation of a distinct point set.

    Attributes:
        vertices: (n, 2) distinct input points, lexicographically sorted
        triangles: (m, 3) vertex indices, each triangle counter-clockwise
        boundary_edges: Directed edges of the outer face as one closed
            counter-clockwise cycle, starting at the smallest vertex index
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: list[tuple[int, int]]


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple polygon without holes, canonically counter-clockwise.

    The ring is normalised on construction: a repeated closing vertex and
    consecutive duplicates are dropped, and clockwise input is reversed.
    """

    ring: np.ndarray

    def __post_init__(self):
        ring = as_points(self.ring, name="ring")
        if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
            ring = ring[:-1]
        if len(ring) > 1:
            keep = np.any(ring != np.roll(ring, 1, axis=0), axis=1)
            ring = ring[keep]
        if len(ring) < 3:
            raise InvalidParamError(f"A polygon needs at least 3 vertices, got {len(ring)}")

        area2 = _signed_area2(ring)
        if area2 == 0.0:
            raise DegenerateInputError("polygon has zero area")
        if area2 < 0.0:
            ring = ring[::-1]

        ring = np.ascontiguousarray(ring)
        ring.setflags(write=False)
        object.__setattr__(self, "ring", ring)

    def __len__(self) -> int:
        return len(self.ring)

    @property
    def area(self) -> float:
        return polygon_area(self)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """Bounding box as (xmin, ymin, xmax, ymax)."""
        xmin, ymin = self.ring.min(axis=0)
        xmax, ymax = self.ring.max(axis=0)
        return float(xmin), float(ymin), float(xmax), float(ymax)

    @property
    def diagonal(self) -> float:
        xmin, ymin, xmax, ymax = self.bounds
        return math.hypot(xmax - xmin, ymax - ymin)

    def vertex_set(self) -> set[Point2D]:
        return {(float(x), float(y)) for x, y in self.ring}


@dataclass(frozen=True, eq=False)
class Contour:
    """Representative of one cluster: its boundary polygon and density.

    Attributes:
        polygon: Boundary of the cluster
        point_count: Number of data points the contour stands for
        density: point_count / polygon area
        source_node: Node that produced (or last merged) the contour
        eps_hint: Eps of the producing DBSCAN node, None for K-Means
    """

    polygon: Polygon
    point_count: int
    density: float
    source_node: int
    eps_hint: float | None = None

    @classmethod
    def from_polygon(
        cls,
        polygon: Polygon,
        point_count: int,
        source_node: int,
        eps_hint: float | None = None,
    ) -> "Contour":
        """Build a contour, deriving density from the polygon area."""
        if point_count < 0:
            raise InvalidParamError(f"point_count must be >= 0, got {point_count}")
        density = point_count / polygon_area(polygon)
        return cls(polygon, int(point_count), float(density), int(source_node), eps_hint)

    @property
    def n_vertices(self) -> int:
        return len(self.polygon)


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def _signed_area2(ring: np.ndarray) -> float:
    x = ring[:, 0]
    y = ring[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _exact_orientation(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    ax, ay = Fraction(float(a[0])), Fraction(float(a[1]))
    bx, by = Fraction(float(b[0])), Fraction(float(b[1]))
    cx, cy = Fraction(float(c[0])), Fraction(float(c[1]))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orientation(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    """Orientation of the triple (a, b, c).

    Returns:
        1 for a counter-clockwise turn, -1 for clockwise, 0 for collinear.
        Near-zero determinants are re-evaluated in exact rational arithmetic.
    """
    left = (b[0] - a[0]) * (c[1] - a[1])
    right = (b[1] - a[1]) * (c[0] - a[0])
    det = left - right
    if abs(det) > _ORIENTATION_ERRBOUND * (abs(left) + abs(right)):
        return 1 if det > 0 else -1
    return _exact_orientation(a, b, c)


def _orientations(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Broadcasting version of orientation() over coordinate arrays of shape (..., 2)."""
    a, b, c = np.broadcast_arrays(a, b, c)
    left = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
    right = (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    det = left - right
    signs = np.sign(det).astype(np.int8)
    uncertain = np.abs(det) <= _ORIENTATION_ERRBOUND * (np.abs(left) + np.abs(right))
    for idx in zip(*np.nonzero(uncertain)):
        signs[idx] = _exact_orientation(a[idx], b[idx], c[idx])
    return signs


def _distinct_points(points) -> np.ndarray:
    pts = as_points(points)
    if len(pts) == 0:
        return pts
    return np.unique(pts, axis=0)


def is_collinear(points) -> bool:
    """True when all points lie on one line (or there are fewer than 3 distinct points)."""
    pts = _distinct_points(points)
    if len(pts) < 3:
        return True
    centered = pts - pts.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    return bool(singular[1] <= 1e-12 * singular[0])


# ---------------------------------------------------------------------------
# Triangulation and boundary extraction
# ---------------------------------------------------------------------------


def _counter_clockwise(vertices: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    simplices = np.array(simplices, dtype=np.int64)
    a = vertices[simplices[:, 0]]
    b = vertices[simplices[:, 1]]
    c = vertices[simplices[:, 2]]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    clockwise = det < 0
    simplices[clockwise, 1], simplices[clockwise, 2] = (
        simplices[clockwise, 2].copy(),
        simplices[clockwise, 1].copy(),
    )
    return simplices


def _directed_edges(triangles: np.ndarray) -> np.ndarray:
    return np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=0
    )


def _boundary_cycle(triangles: np.ndarray) -> list[tuple[int, int]]:
    edges = [tuple(e) for e in _directed_edges(triangles).tolist()]
    present = set(edges)
    successor = {u: v for u, v in edges if (v, u) not in present}

    start = min(successor)
    cycle = []
    u = start
    while True:
        v = successor[u]
        cycle.append((u, v))
        u = v
        if u == start or len(cycle) > len(successor):
            break
    return cycle


def delaunay(points) -> Triangulation:
    """Delaunay triangulation of a 2D point set.

    Exact duplicate points are removed first.

    Args:
        points: Sequence of (x, y) pairs

    Returns:
        Triangulation whose boundary cycle is the convex hull

    Raises:
        DegenerateInputError: Fewer than 3 distinct points, or all collinear
    """
    vertices = _distinct_points(points)
    if len(vertices) < 3:
        raise DegenerateInputError(
            f"need at least 3 distinct points, got {len(vertices)}", n_distinct=len(vertices)
        )
    if is_collinear(vertices):
        raise DegenerateInputError("all points are collinear", n_distinct=len(vertices))

    try:
        qhull = Delaunay(vertices)
    except QhullError as e:
        raise DegenerateInputError(f"triangulation failed: {e}", n_distinct=len(vertices)) from e

    triangles = _counter_clockwise(vertices, qhull.simplices)
    triangles.setflags(write=False)
    vertices.setflags(write=False)
    return Triangulation(vertices, triangles, _boundary_cycle(triangles))


def _edge_lengths(vertices: np.ndarray, edges: np.ndarray) -> np.ndarray:
    d = vertices[edges[:, 0]] - vertices[edges[:, 1]]
    return np.hypot(d[:, 0], d[:, 1])


def _shape_ring(tri: Triangulation, lambda_norm: float) -> list[int]:
    vertices = tri.vertices
    directed = _directed_edges(tri.triangles)
    owner = {}
    for t, (u, v) in zip(np.tile(np.arange(len(tri.triangles)), 3).tolist(), directed.tolist()):
        owner[(u, v)] = t

    undirected = np.unique(np.sort(directed, axis=1), axis=0)
    lengths = _edge_lengths(vertices, undirected)
    l_min, l_max = float(lengths.min()), float(lengths.max())
    threshold = l_min + lambda_norm * (l_max - l_min)

    def length(u: int, v: int) -> float:
        return math.hypot(vertices[u, 0] - vertices[v, 0], vertices[u, 1] - vertices[v, 1])

    successor = dict(tri.boundary_edges)
    on_boundary = np.zeros(len(vertices), dtype=bool)
    on_boundary[list(successor)] = True

    heap = [(-length(u, v), u, v) for u, v in tri.boundary_edges if length(u, v) > threshold]
    heapq.heapify(heap)
    removed = 0
    while heap:
        _, u, v = heapq.heappop(heap)
        if successor.get(u) != v:
            continue
        triangle = tri.triangles[owner[(u, v)]]
        w = int(next(x for x in triangle if x != u and x != v))
        # Regularity: the ring must stay simple
        if on_boundary[w]:
            continue
        successor[u] = w
        successor[w] = v
        on_boundary[w] = True
        removed += 1
        for a, b in ((u, w), (w, v)):
            ab = length(a, b)
            if ab > threshold:
                heapq.heappush(heap, (-ab, a, b))

    start = min(successor)
    ring = [start]
    u = successor[start]
    while u != start:
        ring.append(u)
        u = successor[u]
    logger.debug(
        "characteristic shape: %d points, %d triangles removed, %d boundary vertices",
        len(vertices),
        removed,
        len(ring),
    )
    return ring


def characteristic_shape(points, lambda_norm: float = DEFAULT_LAMBDA_NORM) -> Polygon:
    """Non-convex boundary polygon of a point set.

    The edge-length threshold is l_min + lambda_norm * (l_max - l_min) over
    all Delaunay edges. Boundary edges longer than the threshold are removed
    longest first, unless the vertex opposite the edge is already on the
    boundary. lambda_norm = 1 therefore yields the convex hull.

    Args:
        points: Sequence of (x, y) pairs
        lambda_norm: Normalised length threshold in [0, 1]

    Returns:
        Simple counter-clockwise polygon whose vertices are input points

    Raises:
        DegenerateInputError: Fewer than 3 distinct points, or all collinear
    """
    require_unit_interval(lambda_norm, "lambda_norm")
    tri = delaunay(points)
    ring = _shape_ring(tri, lambda_norm)
    return Polygon(tri.vertices[ring])


def convex_hull(points) -> Polygon:
    """Convex hull of a point set as a counter-clockwise polygon."""
    tri = delaunay(points)
    return Polygon(tri.vertices[[u for u, _ in tri.boundary_edges]])


# ---------------------------------------------------------------------------
# Polygon measures and predicates
# ---------------------------------------------------------------------------


def polygon_area(p: Polygon) -> float:
    """Absolute shoelace area of a polygon."""
    return abs(_signed_area2(p.ring)) / 2.0


def _tolerance_for(p: Polygon) -> float:
    return GEO_TOLERANCE * max(p.diagonal, np.finfo(np.float64).tiny)


def classify_points(points, p: Polygon, tolerance: float | None = None) -> np.ndarray:
    """Classify many points against a polygon.

    Points within `tolerance` of an edge are ON_BOUNDARY; the rest are
    classified by ray crossing.

    Args:
        points: Sequence of (x, y) pairs
        p: Polygon to test against
        tolerance: Boundary distance (defaults to GEO_TOLERANCE x bbox diagonal)

    Returns:
        int8 array of Location codes, one per point
    """
    pts = as_points(points)
    tol = _tolerance_for(p) if tolerance is None else tolerance
    codes = np.full(len(pts), Location.OUTSIDE, dtype=np.int8)
    if len(pts) == 0:
        return codes

    xmin, ymin, xmax, ymax = p.bounds
    candidates = np.nonzero(
        (pts[:, 0] >= xmin - tol)
        & (pts[:, 0] <= xmax + tol)
        & (pts[:, 1] >= ymin - tol)
        & (pts[:, 1] <= ymax + tol)
    )[0]
    if len(candidates) == 0:
        return codes

    ring = p.ring
    ax, ay = ring[:, 0][None, :], ring[:, 1][None, :]
    nxt = np.roll(ring, -1, axis=0)
    bx, by = nxt[:, 0][None, :], nxt[:, 1][None, :]
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy

    chunk = max(1, _MAX_PAIRS_PER_CHUNK // len(ring))
    for start in range(0, len(candidates), chunk):
        idx = candidates[start : start + chunk]
        px = pts[idx, 0][:, None]
        py = pts[idx, 1][:, None]

        t = np.clip(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0)
        ex = px - (ax + t * dx)
        ey = py - (ay + t * dy)
        on_edge = ((ex * ex + ey * ey) <= tol * tol).any(axis=1)

        straddles = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = ax + (py - ay) * dx / dy
        crossings = (straddles & (px < x_cross)).sum(axis=1)

        codes[idx] = np.where(
            on_edge,
            Location.ON_BOUNDARY,
            np.where(crossings % 2 == 1, Location.INSIDE, Location.OUTSIDE),
        )
    return codes


def point_in_polygon(pt: Point2D, p: Polygon) -> Location:
    """Classify one point as INSIDE, ON_BOUNDARY or OUTSIDE a polygon."""
    return Location(int(classify_points([pt], p)[0]))


def _bounds_disjoint(a: Polygon, b: Polygon, margin: float = 0.0) -> bool:
    axmin, aymin, axmax, aymax = a.bounds
    bxmin, bymin, bxmax, bymax = b.bounds
    return (
        axmax + margin < bxmin
        or bxmax + margin < axmin
        or aymax + margin < bymin
        or bymax + margin < aymin
    )


def polygons_intersect(a: Polygon, b: Polygon) -> bool:
    """True if two polygons overlap.

    Overlap means a vertex of one lies inside or on the other (containment
    counts), or an edge of one properly crosses an edge of the other.
    """
    if _bounds_disjoint(a, b, margin=max(_tolerance_for(a), _tolerance_for(b))):
        return False
    if (classify_points(a.ring, b) != Location.OUTSIDE).any():
        return True
    if (classify_points(b.ring, a) != Location.OUTSIDE).any():
        return True

    a0, a1 = a.ring[:, None, :], np.roll(a.ring, -1, axis=0)[:, None, :]
    b0, b1 = b.ring[None, :, :], np.roll(b.ring, -1, axis=0)[None, :, :]
    o1 = _orientations(a0, a1, b0)
    o2 = _orientations(a0, a1, b1)
    o3 = _orientations(b0, b1, a0)
    o4 = _orientations(b0, b1, a1)
    return bool(((o1 * o2 < 0) & (o3 * o4 < 0)).any())


def min_vertex_distance(a: Polygon, b: Polygon) -> float:
    """Smallest Euclidean distance between any vertex of a and any vertex of b."""
    return float(cdist(a.ring, b.ring).min())


def is_simple(p: Polygon) -> bool:
    """True when no two non-adjacent edges of the polygon touch or cross."""
    ring = p.ring
    n = len(ring)
    if n == 3:
        return True
    a0, a1 = ring[:, None, :], np.roll(ring, -1, axis=0)[:, None, :]
    b0, b1 = ring[None, :, :], np.roll(ring, -1, axis=0)[None, :, :]
    o1 = _orientations(a0, a1, b0)
    o2 = _orientations(a0, a1, b1)
    o3 = _orientations(b0, b1, a0)
    o4 = _orientations(b0, b1, a1)
    crossing = (o1 * o2 <= 0) & (o3 * o4 <= 0)

    i, j = np.indices((n, n))
    adjacent = (i == j) | ((i + 1) % n == j) | ((j + 1) % n == i)
    if crossing[~adjacent].any():
        # Collinear but disjoint segments also give zero orientations; check overlap
        for u, v in zip(*np.nonzero(crossing & ~adjacent)):
            if _segments_touch(ring[u], ring[(u + 1) % n], ring[v], ring[(v + 1) % n]):
                return False
    return True


def _segments_touch(p1, p2, q1, q2) -> bool:
    o1 = orientation(p1, p2, q1)
    o2 = orientation(p1, p2, q2)
    o3 = orientation(q1, q2, p1)
    o4 = orientation(q1, q2, p2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def within(p, q, r) -> bool:
        return min(p[0], r[0]) <= q[0] <= max(p[0], r[0]) and min(p[1], r[1]) <= q[1] <= max(
            p[1], r[1]
        )

    return (
        (o1 == 0 and within(p1, q1, p2))
        or (o2 == 0 and within(p1, q2, p2))
        or (o3 == 0 and within(q1, p1, q2))
        or (o4 == 0 and within(q1, p2, q2))
    )


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------


def degenerate_polygon(points, scale: float | None = None) -> Polygon:
    """Tiny rectangle standing in for a cluster that cannot be triangulated.

    The bounding box of the points is grown by eps_deg on every side, where
    eps_deg = DEGENERATE_HALF_SIDE x scale. A single distinct point yields a
    square of side 2 x eps_deg centred on it.

    Args:
        points: Cluster points (at least one)
        scale: Reference length, usually the fragment's bbox diagonal
    """
    pts = as_points(points)
    if len(pts) == 0:
        raise InvalidParamError("degenerate_polygon needs at least one point")
    if scale is None or scale <= 0:
        scale = max(1.0, float(np.abs(pts).max()))
    half = DEGENERATE_HALF_SIDE * scale
    xmin, ymin = pts.min(axis=0) - half
    xmax, ymax = pts.max(axis=0) + half
    return Polygon(np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]))


def make_contour(
    points,
    lambda_norm: float = DEFAULT_LAMBDA_NORM,
    source_node: int = 0,
    eps_hint: float | None = None,
    scale: float | None = None,
) -> Contour:
    """Build the contour representing one cluster.

    Args:
        points: All points of the cluster, duplicates included
        lambda_norm: Characteristic-shape parameter
        source_node: Producing node id
        eps_hint: DBSCAN Eps of the producing node, if any
        scale: Reference length for the degenerate fallback

    Returns:
        Contour with point_count = number of points given
    """
    pts = as_points(points)
    distinct = _distinct_points(pts)
    polygon = None
    if len(distinct) >= 3 and not is_collinear(distinct):
        try:
            polygon = characteristic_shape(distinct, lambda_norm)
        except DegenerateInputError:
            polygon = None
    if polygon is None:
        logger.warning(
            "node %d: cluster of %d points (%d distinct) is degenerate, using a tiny rectangle",
            source_node,
            len(pts),
            len(distinct),
        )
        polygon = degenerate_polygon(distinct, scale)
    return Contour.from_polygon(polygon, len(pts), source_node, eps_hint)


def merge_contours(
    group: Sequence[Contour],
    lambda_norm: float = DEFAULT_LAMBDA_NORM,
    source_node: int | None = None,
) -> Contour:
    """Merge a connected group of contours into one.

    The new polygon is the characteristic shape of the union of the members'
    vertices; the result does not depend on the order of the group.

    Args:
        group: Contours forming one overlap component
        lambda_norm: Characteristic-shape parameter
        source_node: Owner of the merged contour (defaults to the smallest member node)

    Returns:
        Merged contour; a singleton group is returned unchanged
    """
    if not group:
        raise InvalidParamError("merge_contours needs at least one contour")
    if len(group) == 1:
        return group[0]

    vertices = np.unique(np.concatenate([c.polygon.ring for c in group]), axis=0)
    polygon = characteristic_shape(vertices, lambda_norm)
    hints = [c.eps_hint for c in group if c.eps_hint is not None]
    owner = min(c.source_node for c in group) if source_node is None else source_node
    return Contour.from_polygon(
        polygon,
        sum(c.point_count for c in group),
        owner,
        max(hints) if hints else None,
    )


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

_WKT_POLYGON = re.compile(r"^\s*POLYGON\s*\(\((?P<coords>[^()]*)\)\)\s*$", re.IGNORECASE)


def _fmt(value: float) -> str:
    return f"{value:.{WKT_SIGNIFICANT_DIGITS}g}"


def polygon_to_wkt(p: Polygon) -> str:
    """WKT text of a polygon with 9 significant digits, closing vertex repeated."""
    coords = [f"{_fmt(x)} {_fmt(y)}" for x, y in p.ring.tolist()]
    coords.append(coords[0])
    return f"POLYGON (({', '.join(coords)}))"


def polygon_from_wkt(text: str) -> Polygon:
    match = _WKT_POLYGON.match(text)
    if not match:
        raise ValueError(f"not a single-ring WKT polygon: {text[:40]!r}")
    coords = [pair.split() for pair in match.group("coords").split(",")]
    return Polygon(np.array([[float(x), float(y)] for x, y in coords]))


def format_contour_line(contour: Contour) -> str:
    """One line of a contour file: point_count;density;WKT."""
    return f"{contour.point_count};{_fmt(contour.density)};{polygon_to_wkt(contour.polygon)}"


def parse_contour_line(
    line: str, path: str = "<string>", line_number: int = 1, source_node: int = 0
) -> Contour:
    """Parse one contour line. Density is recomputed from the polygon."""
    try:
        count_text, density_text, wkt = line.strip().split(";", 2)
        float(density_text)
        polygon = polygon_from_wkt(wkt)
        return Contour.from_polygon(polygon, int(count_text), source_node)
    except (ValueError, InvalidParamError, DegenerateInputError) as e:
        raise ParseError(path, line_number, str(e)) from e


def serialized_size(contours: Iterable[Contour]) -> int:
    """Bytes needed to ship contours as UTF-8 contour-file lines."""
    return sum(len(format_contour_line(c).encode("utf-8")) + 1 for c in contours)


def write_contours(path: Path, contours: Iterable[Contour]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for contour in contours:
                f.write(format_contour_line(contour) + "\n")
    except OSError as e:
        raise DataIOError(f"Failed to write contours to {path}: {e}") from e


def read_contours(path: Path) -> list[Contour]:
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise DataIOError(f"Failed to read contours from {path}: {e}") from e
    return [
        parse_contour_line(line, str(path), number)
        for number, line in enumerate(lines, start=1)
        if line.strip()
    ]
