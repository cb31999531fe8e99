"""Synthetic benchmark datasets, partitioning across nodes, and point-file I/O.

Every shape is sampled uniformly inside its region (rejection sampling in
the shape's own frame), then scaled, rotated and moved to its centre.
Background noise is uniform over the dataset's bounding box. Ground truth
labels are the shape index for shape points and NOISE for noise.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .exceptions import DataIOError, InvalidParamError, InvalidSpecError, ParseError
from .local_cluster import NOISE, Labeling
from .validation import as_points, require_at_least

logger = logging.getLogger(__name__)

CSV_DIGITS = 9
PRESETS_PACKAGE = "ddc_tools.presets"


class ShapeKind(str, Enum):
    GAUSSIAN_BLOB = "gaussian_blob"
    DISK = "disk"
    OVAL = "oval"
    ANNULUS = "annulus"
    LINKED_CIRCLES = "linked_circles"
    STENCIL_POLYLINE = "stencil_polyline"


class PartitionStrategy(str, Enum):
    SPATIAL_GRID = "spatial_grid"
    RANDOM = "random"
    ROUND_ROBIN = "round_robin"


# Shape parameters in the shape's own frame, before scale and rotation
_SHAPE_DEFAULTS: dict[ShapeKind, dict[str, Any]] = {
    ShapeKind.GAUSSIAN_BLOB: {"sigma": 1.0},
    ShapeKind.DISK: {"radius": 1.0},
    ShapeKind.OVAL: {"a": 1.0, "b": 0.5},
    ShapeKind.ANNULUS: {"inner": 0.5, "outer": 1.0, "start_angle": 0.0, "end_angle": 360.0},
    ShapeKind.LINKED_CIRCLES: {"radius": 1.0, "minor": None, "separation": 1.0},
    ShapeKind.STENCIL_POLYLINE: {"strokes": [], "width": 0.2},
}


@dataclass(frozen=True)
class ShapeSpec:
    """One generated cluster.

    Attributes:
        kind: Region type
        points: Number of points sampled in the region
        center: Where the shape's origin is placed
        rotation: Counter-clockwise rotation in degrees
        scale: Uniform scale applied before rotation
        params: Kind-specific parameters (see _SHAPE_DEFAULTS)
    """

    kind: ShapeKind
    points: int
    center: tuple[float, float] = (0.0, 0.0)
    rotation: float = 0.0
    scale: float = 1.0
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ShapeKind(self.kind))
        except ValueError as e:
            choices = ", ".join(k.value for k in ShapeKind)
            raise InvalidSpecError(f"Unknown shape kind {self.kind!r} (choose from {choices})") from e
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 1:
            raise InvalidSpecError(f"Shape points must be an integer >= 1, got {self.points!r}")
        if not (isinstance(self.scale, (int, float)) and math.isfinite(self.scale) and self.scale > 0):
            raise InvalidSpecError(f"Shape scale must be > 0, got {self.scale!r}")

        unknown = set(self.params) - set(_SHAPE_DEFAULTS[self.kind])
        if unknown:
            raise InvalidSpecError(
                f"Unknown parameters for {self.kind.value}: {', '.join(sorted(unknown))}"
            )
        merged = {**_SHAPE_DEFAULTS[self.kind], **self.params}
        _check_shape_params(self.kind, merged)
        object.__setattr__(self, "params", merged)
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class DatasetSpec:
    """Recipe for a synthetic dataset.

    Attributes:
        shapes: Clusters to generate; ground-truth id = position in this list
        noise_fraction: Share of the total points that is uniform noise, in [0, 1)
        bbox: (xmin, ymin, xmax, ymax) of the noise region; None = shapes' extent
        seed: RNG seed
        name: Label used in reports
    """

    shapes: tuple[ShapeSpec, ...]
    noise_fraction: float = 0.0
    bbox: tuple[float, float, float, float] | None = None
    seed: int = 0
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        if not self.shapes:
            raise InvalidSpecError("A dataset needs at least one shape")
        if not 0.0 <= self.noise_fraction < 1.0:
            raise InvalidSpecError(f"noise_fraction must lie in [0, 1), got {self.noise_fraction!r}")
        if self.bbox is not None:
            xmin, ymin, xmax, ymax = (float(v) for v in self.bbox)
            if not (xmin < xmax and ymin < ymax):
                raise InvalidSpecError(f"Invalid bbox {self.bbox!r}")
            object.__setattr__(self, "bbox", (xmin, ymin, xmax, ymax))

    @property
    def shape_points(self) -> int:
        return sum(s.points for s in self.shapes)

    @property
    def noise_points(self) -> int:
        f = self.noise_fraction
        return round(self.shape_points * f / (1.0 - f))

    @property
    def total_points(self) -> int:
        return self.shape_points + self.noise_points

    @property
    def expected_clusters(self) -> int:
        return len(self.shapes)

    def scaled(self, total_points: int) -> "DatasetSpec":
        """Same layout with every shape's point count rescaled to reach about total_points."""
        require_at_least(total_points, 1, "total_points")
        factor = total_points / self.total_points
        shapes = tuple(
            ShapeSpec(s.kind, max(1, round(s.points * factor)), s.center, s.rotation, s.scale, s.params)
            for s in self.shapes
        )
        return DatasetSpec(shapes, self.noise_fraction, self.bbox, self.seed, self.name)

    def with_seed(self, seed: int) -> "DatasetSpec":
        return DatasetSpec(self.shapes, self.noise_fraction, self.bbox, seed, self.name)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Points with optional ground truth."""

    points: np.ndarray
    truth: Labeling | None = None
    name: str = "dataset"

    def __post_init__(self):
        pts = as_points(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.truth is not None and len(self.truth) != len(pts):
            raise InvalidSpecError(
                f"Ground truth has {len(self.truth)} labels for {len(pts)} points"
            )

    def __len__(self) -> int:
        return len(self.points)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        xmin, ymin = self.points.min(axis=0)
        xmax, ymax = self.points.max(axis=0)
        return float(xmin), float(ymin), float(xmax), float(ymax)

    @property
    def diagonal(self) -> float:
        if len(self) == 0:
            return 0.0
        xmin, ymin, xmax, ymax = self.bounds
        return math.hypot(xmax - xmin, ymax - ymin)


@dataclass(frozen=True, eq=False)
class DatasetFragment:
    """The share of a dataset held by one node.

    Attributes:
        points: Coordinates of the fragment's points
        origin_ids: Ascending indices of those points in the parent dataset
        node_id: Owning node
    """

    points: np.ndarray
    origin_ids: np.ndarray
    node_id: int

    def __len__(self) -> int:
        return len(self.origin_ids)


# ---------------------------------------------------------------------------
# Shape regions
# ---------------------------------------------------------------------------


def _check_shape_params(kind: ShapeKind, p: dict[str, Any]) -> None:
    def positive(*names: str) -> None:
        for name in names:
            value = p[name]
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise InvalidSpecError(f"{kind.value}.{name} must be > 0, got {value!r}")

    if kind is ShapeKind.GAUSSIAN_BLOB:
        positive("sigma")
    elif kind is ShapeKind.DISK:
        positive("radius")
    elif kind is ShapeKind.OVAL:
        positive("a", "b")
    elif kind is ShapeKind.ANNULUS:
        positive("outer")
        if not 0 <= p["inner"] < p["outer"]:
            raise InvalidSpecError("annulus needs 0 <= inner < outer")
        if not p["start_angle"] < p["end_angle"] <= p["start_angle"] + 360:
            raise InvalidSpecError("annulus needs start_angle < end_angle <= start_angle + 360")
    elif kind is ShapeKind.LINKED_CIRCLES:
        positive("radius")
        if p["minor"] is not None:
            positive("minor")
        if p["separation"] < 0:
            raise InvalidSpecError("linked_circles.separation must be >= 0")
    elif kind is ShapeKind.STENCIL_POLYLINE:
        positive("width")
        strokes = p["strokes"]
        if not strokes or any(len(stroke) < 2 for stroke in strokes):
            raise InvalidSpecError("stencil_polyline needs strokes of at least 2 vertices each")


def _segment_distance2(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    t = np.zeros(len(pts)) if denom == 0 else np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    closest = a + t[:, None] * ab
    d = pts - closest
    return (d * d).sum(axis=1)


def _region(kind: ShapeKind, p: dict[str, Any]) -> tuple[Callable[[np.ndarray], np.ndarray], tuple]:
    """Membership test and local bounding box of a shape region."""
    if kind is ShapeKind.DISK:
        r = p["radius"]
        return (lambda q: (q * q).sum(axis=1) <= r * r), (-r, -r, r, r)

    if kind is ShapeKind.OVAL:
        a, b = p["a"], p["b"]
        return (lambda q: (q[:, 0] / a) ** 2 + (q[:, 1] / b) ** 2 <= 1.0), (-a, -b, a, b)

    if kind is ShapeKind.ANNULUS:
        inner, outer = p["inner"], p["outer"]
        start, end = p["start_angle"], p["end_angle"]

        def in_annulus(q: np.ndarray) -> np.ndarray:
            r2 = (q * q).sum(axis=1)
            ok = (r2 >= inner * inner) & (r2 <= outer * outer)
            if end - start < 360:
                angle = (np.degrees(np.arctan2(q[:, 1], q[:, 0])) - start) % 360.0
                ok &= angle <= end - start
            return ok

        return in_annulus, (-outer, -outer, outer, outer)

    if kind is ShapeKind.LINKED_CIRCLES:
        a = p["radius"]
        b = p["minor"] if p["minor"] is not None else a
        half = p["separation"] / 2.0

        def in_pair(q: np.ndarray) -> np.ndarray:
            left = ((q[:, 0] + half) / a) ** 2 + (q[:, 1] / b) ** 2 <= 1.0
            right = ((q[:, 0] - half) / a) ** 2 + (q[:, 1] / b) ** 2 <= 1.0
            return left | right

        return in_pair, (-half - a, -b, half + a, b)

    # stencil_polyline
    strokes = [np.asarray(s, dtype=np.float64) for s in p["strokes"]]
    reach = p["width"] / 2.0
    segments = [(s[i], s[i + 1]) for s in strokes for i in range(len(s) - 1)]
    allv = np.concatenate(strokes)
    xmin, ymin = allv.min(axis=0) - reach
    xmax, ymax = allv.max(axis=0) + reach

    def in_band(q: np.ndarray) -> np.ndarray:
        ok = np.zeros(len(q), dtype=bool)
        for a, b in segments:
            ok |= _segment_distance2(q, a, b) <= reach * reach
        return ok

    return in_band, (xmin, ymin, xmax, ymax)


def _rejection_sample(contains, bounds, n: int, rng: np.random.Generator) -> np.ndarray:
    xmin, ymin, xmax, ymax = bounds
    accepted: list[np.ndarray] = []
    have = 0
    while have < n:
        batch = 2 * (n - have) + 64
        cand = rng.uniform((xmin, ymin), (xmax, ymax), size=(batch, 2))
        cand = cand[contains(cand)]
        accepted.append(cand)
        have += len(cand)
    return np.concatenate(accepted)[:n]


def sample_shape(shape: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw shape.points points for one shape, in dataset coordinates."""
    if shape.kind is ShapeKind.GAUSSIAN_BLOB:
        local = rng.normal(0.0, shape.params["sigma"], size=(shape.points, 2))
    else:
        contains, bounds = _region(shape.kind, shape.params)
        local = _rejection_sample(contains, bounds, shape.points, rng)

    theta = math.radians(shape.rotation)
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    return (local * shape.scale) @ rot.T + np.asarray(shape.center)


# ---------------------------------------------------------------------------
# Generation and partitioning
# ---------------------------------------------------------------------------


def generate(spec: DatasetSpec) -> Dataset:
    """Generate a dataset with ground truth; deterministic for a fixed seed.

    Points are shuffled so that file order carries no shape information.
    """
    rng = np.random.default_rng(spec.seed)
    parts = [sample_shape(shape, rng) for shape in spec.shapes]
    labels = [np.full(shape.points, i, dtype=np.int64) for i, shape in enumerate(spec.shapes)]

    if spec.noise_points:
        if spec.bbox is not None:
            xmin, ymin, xmax, ymax = spec.bbox
        else:
            stacked = np.concatenate(parts)
            xmin, ymin = stacked.min(axis=0)
            xmax, ymax = stacked.max(axis=0)
        parts.append(rng.uniform((xmin, ymin), (xmax, ymax), size=(spec.noise_points, 2)))
        labels.append(np.full(spec.noise_points, NOISE, dtype=np.int64))

    points = np.concatenate(parts)
    truth = np.concatenate(labels)
    order = rng.permutation(len(points))
    logger.debug(
        "generated %s: %d shape points, %d noise points",
        spec.name,
        spec.shape_points,
        spec.noise_points,
    )
    return Dataset(points[order], Labeling(truth[order], spec.expected_clusters), spec.name)


def uniform_points(n: int, side: float, seed: int = 0) -> Dataset:
    """n points uniform over the square [0, side]^2, without ground truth."""
    rng = np.random.default_rng(seed)
    return Dataset(rng.uniform(0.0, side, size=(n, 2)), None, f"uniform-{n}")


def grid_shape(n_nodes: int) -> tuple[int, int]:
    """(rows, cols) of the spatial grid: rows is the largest divisor of n_nodes <= sqrt(n_nodes)."""
    rows = max(d for d in range(1, math.isqrt(n_nodes) + 1) if n_nodes % d == 0)
    return rows, n_nodes // rows


def partition(
    dataset: Dataset,
    n_nodes: int,
    strategy: PartitionStrategy | str = PartitionStrategy.SPATIAL_GRID,
    seed: int = 0,
) -> list[DatasetFragment]:
    """Split a dataset into n_nodes disjoint fragments covering it.

    spatial_grid cuts the data into equal-count vertical strips, each cut
    into equal-count cells along y; node ids run column by column.
    random deals a seeded permutation into near-equal chunks; round_robin
    gives point i to node i mod n_nodes.

    Raises:
        InvalidParamError: If n_nodes < 1 or the strategy is unknown
    """
    require_at_least(n_nodes, 1, "n_nodes")
    try:
        strategy = PartitionStrategy(strategy)
    except ValueError as e:
        choices = ", ".join(s.value for s in PartitionStrategy)
        raise InvalidParamError(f"Unknown partition strategy {strategy!r} (choose from {choices})") from e

    n = len(dataset)
    pts = dataset.points
    if strategy is PartitionStrategy.ROUND_ROBIN:
        groups = [np.arange(j, n, n_nodes) for j in range(n_nodes)]
    elif strategy is PartitionStrategy.RANDOM:
        rng = np.random.default_rng(seed)
        groups = np.array_split(rng.permutation(n), n_nodes)
    else:
        rows, cols = grid_shape(n_nodes)
        by_x = np.lexsort((pts[:, 1], pts[:, 0]))
        groups = []
        for strip in np.array_split(by_x, cols):
            by_y = strip[np.lexsort((pts[strip, 0], pts[strip, 1]))]
            groups.extend(np.array_split(by_y, rows))

    fragments = []
    for node_id, ids in enumerate(groups):
        ids = np.sort(np.asarray(ids, dtype=np.int64))
        fragments.append(DatasetFragment(pts[ids], ids, node_id))
    logger.debug(
        "partitioned %d points over %d nodes (%s): sizes %s",
        n,
        n_nodes,
        strategy.value,
        [len(f) for f in fragments],
    )
    return fragments


# ---------------------------------------------------------------------------
# Point files
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.{CSV_DIGITS}g}"


def write_points(path: Path, dataset: Dataset, labels: Labeling | None = None) -> None:
    """Write a point CSV with header x,y[,label].

    Args:
        path: Output file
        dataset: Points to write
        labels: Label column to write (defaults to the dataset's ground truth, if any)
    """
    labels = labels if labels is not None else dataset.truth
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            if labels is None:
                writer.writerow(["x", "y"])
                writer.writerows([_fmt(x), _fmt(y)] for x, y in dataset.points.tolist())
            else:
                writer.writerow(["x", "y", "label"])
                writer.writerows(
                    [_fmt(x), _fmt(y), str(lab)]
                    for (x, y), lab in zip(dataset.points.tolist(), labels.labels.tolist())
                )
    except OSError as e:
        raise DataIOError(f"Failed to write points to {path}: {e}") from e


def _file_labeling(labels: list[int]) -> Labeling:
    """Labeling read from a file: contiguous ids are kept as written, ids with gaps are renumbered."""
    raw = np.asarray(labels, dtype=np.int64)
    used = np.unique(raw[raw != NOISE])
    if (raw >= NOISE).all() and np.array_equal(used, np.arange(len(used))):
        return Labeling(raw, len(used))
    return Labeling.from_labels(raw)


def read_points(path: Path) -> Dataset:
    """Read a point CSV written by write_points (label column optional).

    Raises:
        DataIOError: If the file cannot be opened
        ParseError: On a malformed header or row, with its line number
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise DataIOError(
            f"Failed to read points from {path}: {e}",
            user_message=f"Cannot read point file: {path}",
        ) from e

    if not rows:
        raise ParseError(str(path), 1, "missing header")
    header = [h.strip() for h in rows[0]]
    if header not in (["x", "y"], ["x", "y", "label"]):
        raise ParseError(str(path), 1, f"expected header x,y[,label], got {','.join(header)}")
    with_labels = len(header) == 3

    coords, labels = [], []
    for line_number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(str(path), line_number, f"expected {len(header)} fields, got {len(row)}")
        try:
            x, y = float(row[0]), float(row[1])
            if with_labels:
                labels.append(int(row[2]))
        except ValueError as e:
            raise ParseError(str(path), line_number, str(e)) from e
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(str(path), line_number, "non-finite coordinate")
        coords.append((x, y))

    truth = _file_labeling(labels) if with_labels else None
    return Dataset(np.array(coords, dtype=np.float64).reshape(-1, 2), truth, path.stem)


# ---------------------------------------------------------------------------
# Spec files and presets
# ---------------------------------------------------------------------------


def shape_from_dict(data: dict[str, Any]) -> ShapeSpec:
    allowed = {"kind", "points", "center", "rotation", "scale", "params"}
    unknown = set(data) - allowed
    if unknown:
        raise InvalidSpecError(f"Unknown shape fields: {', '.join(sorted(unknown))}")
    try:
        return ShapeSpec(
            kind=data["kind"],
            points=data["points"],
            center=tuple(data.get("center", (0.0, 0.0))),
            rotation=float(data.get("rotation", 0.0)),
            scale=float(data.get("scale", 1.0)),
            params=dict(data.get("params", {})),
        )
    except KeyError as e:
        raise InvalidSpecError(f"Shape is missing field {e.args[0]!r}") from e
    except InvalidSpecError:
        raise
    except (TypeError, ValueError) as e:
        raise InvalidSpecError(f"Invalid shape: {e}") from e


def spec_from_dict(data: dict[str, Any], name: str = "dataset") -> DatasetSpec:
    """Build a DatasetSpec from its JSON form."""
    if not isinstance(data, dict):
        raise InvalidSpecError("Dataset spec must be a JSON object")
    allowed = {"shapes", "noise_fraction", "bbox", "seed", "name"}
    unknown = set(data) - allowed
    if unknown:
        raise InvalidSpecError(f"Unknown dataset fields: {', '.join(sorted(unknown))}")
    if "shapes" not in data:
        raise InvalidSpecError("Dataset spec needs a 'shapes' list")
    bbox = data.get("bbox")
    return DatasetSpec(
        shapes=tuple(shape_from_dict(s) for s in data["shapes"]),
        noise_fraction=float(data.get("noise_fraction", 0.0)),
        bbox=tuple(bbox) if bbox is not None else None,
        seed=int(data.get("seed", 0)),
        name=str(data.get("name", name)),
    )


def spec_to_dict(spec: DatasetSpec) -> dict[str, Any]:
    return {
        "name": spec.name,
        "seed": spec.seed,
        "noise_fraction": spec.noise_fraction,
        "bbox": list(spec.bbox) if spec.bbox is not None else None,
        "shapes": [
            {
                "kind": s.kind.value,
                "points": s.points,
                "center": list(s.center),
                "rotation": s.rotation,
                "scale": s.scale,
                "params": s.params,
            }
            for s in spec.shapes
        ],
    }


def _read_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise DataIOError(
            f"Failed to read {path}: {e}", user_message=f"Cannot read file: {path}"
        ) from e
    except json.JSONDecodeError as e:
        raise InvalidSpecError(f"{path} is not valid JSON: {e}") from e


def load_spec(path: Path) -> DatasetSpec:
    """Load a dataset spec JSON file (a bare spec, or a preset with a 'dataset' block)."""
    path = Path(path)
    data = _read_json(path)
    if isinstance(data, dict) and "dataset" in data:
        data = data["dataset"]
    return spec_from_dict(data, name=path.stem)


def preset_names() -> list[str]:
    files = resources.files(PRESETS_PACKAGE).iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name: str) -> dict[str, Any]:
    """Raw preset document with 'dataset' and 'run' blocks.

    Raises:
        InvalidSpecError: If no preset of that name ships with the package
    """
    resource = resources.files(PRESETS_PACKAGE).joinpath(f"{name}.json")
    if not resource.is_file():
        raise InvalidSpecError(
            f"Unknown preset {name!r} (available: {', '.join(preset_names())})"
        )
    return json.loads(resource.read_text(encoding="utf-8"))


def preset_spec(name: str, seed: int | None = None) -> DatasetSpec:
    spec = spec_from_dict(load_preset(name)["dataset"], name=name)
    return spec if seed is None else spec.with_seed(seed)
