"""Unit tests for contour geometry.

Test Coverage:
- Polygon normalisation (closing vertex, orientation, degenerate rings)
- Orientation predicate and collinearity
- Delaunay wrapper and its degenerate-input errors
- Characteristic shape: convex hull at lambda 1, containment, concavity, simplicity
- Point location, polygon overlap and vertex distance
- Degenerate and merged contours
- Contour text format
"""

import logging

import numpy as np
import pytest

from ddc_tools.core.data import DatasetSpec, ShapeSpec, generate
from ddc_tools.core.exceptions import DegenerateInputError, InvalidParamError, ParseError
from ddc_tools.core.geometry import (
    Location,
    Polygon,
    characteristic_shape,
    classify_points,
    convex_hull,
    delaunay,
    format_contour_line,
    is_collinear,
    is_simple,
    make_contour,
    merge_contours,
    min_vertex_distance,
    orientation,
    parse_contour_line,
    point_in_polygon,
    polygon_area,
    polygon_to_wkt,
    polygons_intersect,
    read_contours,
    serialized_size,
    write_contours,
)
from tests.conftest import make_contour as contour_around
from tests.conftest import make_square


def l_shaped_points(rng, step=0.5):
    """Jittered grid filling an L: [0,10]^2 minus [3,10]^2."""
    xs, ys = np.meshgrid(np.arange(0, 10 + step, step), np.arange(0, 10 + step, step))
    grid = np.column_stack([xs.ravel(), ys.ravel()])
    grid = grid[(grid[:, 0] <= 3) | (grid[:, 1] <= 3)]
    return grid + rng.uniform(-0.01, 0.01, size=grid.shape)


def star_polygon(rng, n=40):
    """Random simple polygon: vertices at sorted random angles with random radii."""
    angles = np.sort(rng.uniform(0.0, 2 * np.pi, size=n))
    radii = rng.uniform(0.5, 1.5, size=n)
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def winding_numbers(points, ring):
    """Winding number of every point around a closed ring."""
    px, py = points[:, 0][:, None], points[:, 1][:, None]
    nxt = np.roll(ring, -1, axis=0)
    ax, ay = ring[:, 0][None, :], ring[:, 1][None, :]
    bx, by = nxt[:, 0][None, :], nxt[:, 1][None, :]
    side = (bx - ax) * (py - ay) - (px - ax) * (by - ay)
    upward = (ay <= py) & (by > py) & (side > 0)
    downward = (ay > py) & (by <= py) & (side < 0)
    return upward.sum(axis=1) - downward.sum(axis=1)


def edge_distances(points, ring):
    """Distance of every point to the nearest edge of a closed ring."""
    nxt = np.roll(ring, -1, axis=0)
    best = np.full(len(points), np.inf)
    for a, b in zip(ring, nxt):
        d = b - a
        t = np.clip(((points - a) @ d) / (d @ d), 0.0, 1.0)
        best = np.minimum(best, np.linalg.norm(points - (a + t[:, None] * d), axis=1))
    return best


class TestPolygon:
    """Tests for Polygon normalisation."""

    def test_drops_closing_vertex(self):
        ring = make_square() + [(0.0, 0.0)]
        assert len(Polygon(ring)) == 4

    def test_clockwise_input_is_reversed(self):
        clockwise = list(reversed(make_square()))
        p = Polygon(clockwise)
        assert polygon_area(p) == pytest.approx(1.0)
        assert orientation(p.ring[0], p.ring[1], p.ring[2]) == 1

    def test_bounds_and_area(self):
        p = Polygon(make_square(2.0, 3.0, side=2.0))
        assert p.bounds == (2.0, 3.0, 4.0, 5.0)
        assert p.area == pytest.approx(4.0)
        assert p.diagonal == pytest.approx(np.sqrt(8.0))

    def test_too_few_vertices(self):
        with pytest.raises(InvalidParamError, match="at least 3 vertices"):
            Polygon([(0, 0), (1, 0), (0, 0)])

    def test_zero_area(self):
        with pytest.raises(DegenerateInputError):
            Polygon([(0, 0), (1, 1), (2, 2)])


class TestPredicates:
    """Tests for orientation and collinearity."""

    @pytest.mark.parametrize(
        "a,b,c,expected",
        [
            ((0, 0), (1, 0), (0, 1), 1),
            ((0, 0), (0, 1), (1, 0), -1),
            ((1, 1), (2, 2), (3, 3), 0),
            ((0, 0), (1e-20, 0), (2e-20, 1e-40), 1),
        ],
    )
    def test_orientation(self, a, b, c, expected):
        assert orientation(a, b, c) == expected

    def test_is_collinear(self):
        assert is_collinear([(0, 0), (1, 1), (2, 2), (5, 5)])
        assert is_collinear([(0, 0), (1, 1)])
        assert not is_collinear([(0, 0), (1, 0), (0, 1)])


class TestDelaunay:
    """Tests for the Delaunay wrapper."""

    def test_square_with_centre(self):
        tri = delaunay(make_square() + [(0.5, 0.4)])
        assert len(tri.vertices) == 5
        assert len(tri.triangles) == 4
        assert len(tri.boundary_edges) == 4

    def test_duplicates_removed(self):
        tri = delaunay([(0, 0), (0, 0), (1, 0), (0, 1)])
        assert len(tri.vertices) == 3
        assert len(tri.triangles) == 1

    def test_boundary_is_closed_cycle(self, rng):
        tri = delaunay(rng.uniform(0, 1, size=(200, 2)))
        for (_, v), (u, _) in zip(tri.boundary_edges, tri.boundary_edges[1:] + tri.boundary_edges[:1]):
            assert v == u

    def test_too_few_points(self):
        with pytest.raises(DegenerateInputError) as exc_info:
            delaunay([(0, 0), (1, 1), (1, 1)])
        assert exc_info.value.n_distinct == 2

    def test_collinear_points(self):
        with pytest.raises(DegenerateInputError, match="collinear"):
            delaunay([(0, 0), (1, 1), (2, 2), (3, 3)])

    def test_empty_circumcircles(self):
        pts = np.random.default_rng(42).uniform(0, 1, size=(200, 2))
        tri = delaunay(pts)
        a, b, c = (tri.vertices[tri.triangles[:, i]] for i in range(3))
        sa, sb, sc = ((p * p).sum(axis=1) for p in (a, b, c))
        d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
        ux = (sa * (b[:, 1] - c[:, 1]) + sb * (c[:, 1] - a[:, 1]) + sc * (a[:, 1] - b[:, 1])) / d
        uy = (sa * (c[:, 0] - b[:, 0]) + sb * (a[:, 0] - c[:, 0]) + sc * (b[:, 0] - a[:, 0])) / d
        centres = np.column_stack([ux, uy])
        radii2 = ((a - centres) ** 2).sum(axis=1)

        d2 = ((tri.vertices[None, :, :] - centres[:, None, :]) ** 2).sum(axis=2)
        assert (d2 >= radii2[:, None] * (1 - 1e-9) - 1e-12).all()


class TestCharacteristicShape:
    """Tests for characteristic_shape."""

    def test_lambda_one_is_convex_hull(self, rng):
        pts = rng.uniform(0, 10, size=(300, 2))
        shape = characteristic_shape(pts, 1.0)
        hull = convex_hull(pts)
        assert shape.vertex_set() == hull.vertex_set()

    @pytest.mark.parametrize("lambda_norm", [0.0, 0.1, 0.3, 0.7])
    def test_all_points_contained(self, rng, lambda_norm):
        pts = rng.uniform(0, 5, size=(400, 2))
        shape = characteristic_shape(pts, lambda_norm)
        assert (classify_points(pts, shape) != Location.OUTSIDE).all()
        assert is_simple(shape)

    def test_vertices_are_input_points(self, rng):
        pts = rng.uniform(0, 5, size=(100, 2))
        shape = characteristic_shape(pts)
        inputs = {tuple(p) for p in pts.tolist()}
        assert shape.vertex_set() <= inputs

    def test_follows_concavity(self, rng):
        """An L-shaped cloud gets a clearly smaller area than its hull."""
        pts = l_shaped_points(rng)
        shape = characteristic_shape(pts, 0.3)
        hull = convex_hull(pts)
        assert hull.area == pytest.approx(75.5, rel=0.02)
        assert shape.area < 0.9 * hull.area
        assert (classify_points(pts, shape) != Location.OUTSIDE).all()

    def test_area_grows_with_lambda(self, rng):
        pts = l_shaped_points(rng)
        areas = [characteristic_shape(pts, lam).area for lam in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)]
        assert all(lo <= hi + 1e-9 for lo, hi in zip(areas, areas[1:]))

    def test_annulus_sector_is_concave(self):
        sector = ShapeSpec(
            "annulus",
            1000,
            params={"inner": 6.0, "outer": 10.0, "start_angle": 45.0, "end_angle": 315.0},
        )
        pts = generate(DatasetSpec((sector,), seed=7)).points
        shape = characteristic_shape(pts, 0.2)

        assert shape.area < 0.8 * convex_hull(pts).area
        assert (classify_points(pts, shape) != Location.OUTSIDE).all()
        assert is_simple(shape)

    def test_rejects_lambda_out_of_range(self, rng):
        with pytest.raises(InvalidParamError):
            characteristic_shape(rng.uniform(size=(10, 2)), 1.5)

    def test_degenerate_input(self):
        with pytest.raises(DegenerateInputError):
            characteristic_shape([(0, 0), (1, 0)])


class TestPointLocation:
    """Tests for point_in_polygon and classify_points."""

    @pytest.mark.parametrize(
        "pt,expected",
        [
            ((0.5, 0.5), Location.INSIDE),
            ((1.0, 0.5), Location.ON_BOUNDARY),
            ((0.0, 0.0), Location.ON_BOUNDARY),
            ((2.0, 2.0), Location.OUTSIDE),
            ((1.5, 0.5), Location.OUTSIDE),
        ],
    )
    def test_unit_square(self, unit_square, pt, expected):
        assert point_in_polygon(pt, Polygon(unit_square)) == expected

    def test_concave_polygon(self):
        p = Polygon([(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)])
        assert point_in_polygon((2, 3), p) == Location.OUTSIDE
        assert point_in_polygon((1, 1), p) == Location.INSIDE

    def test_classify_points_matches_single(self, rng, unit_square):
        p = Polygon(unit_square)
        pts = rng.uniform(-0.5, 1.5, size=(50, 2))
        codes = classify_points(pts, p)
        assert [Location(c) for c in codes] == [point_in_polygon(tuple(q), p) for q in pts]

    def test_agrees_with_winding_numbers(self, rng):
        ring = star_polygon(rng)
        polygon = Polygon(ring)
        pts = rng.uniform(-2.0, 2.0, size=(10_000, 2))
        pts = pts[edge_distances(pts, ring) > 1e-6]

        codes = classify_points(pts, polygon)
        inside = winding_numbers(pts, ring) != 0
        assert (codes != Location.ON_BOUNDARY).all()
        assert np.array_equal(codes == Location.INSIDE, inside)
        assert 0 < inside.sum() < len(pts)

    def test_classify_empty(self, unit_square):
        assert len(classify_points([], Polygon(unit_square))) == 0


class TestOverlap:
    """Tests for polygons_intersect and min_vertex_distance."""

    def test_overlapping_squares(self):
        assert polygons_intersect(Polygon(make_square()), Polygon(make_square(0.5, 0.5)))

    def test_disjoint_squares(self):
        assert not polygons_intersect(Polygon(make_square()), Polygon(make_square(3.0, 0.0)))

    def test_containment_counts(self):
        outer = Polygon(make_square(side=10.0))
        inner = Polygon(make_square(4.0, 4.0))
        assert polygons_intersect(outer, inner)
        assert polygons_intersect(inner, outer)

    def test_shared_edge_counts(self):
        assert polygons_intersect(Polygon(make_square()), Polygon(make_square(1.0, 0.0)))

    def test_crossing_without_contained_vertices(self):
        wide = Polygon([(0, 1), (3, 1), (3, 2), (0, 2)])
        tall = Polygon([(1, 0), (2, 0), (2, 3), (1, 3)])
        assert polygons_intersect(wide, tall)

    def test_min_vertex_distance(self):
        a = Polygon(make_square())
        b = Polygon(make_square(3.0, 0.0))
        assert min_vertex_distance(a, b) == pytest.approx(2.0)

    def test_is_simple_detects_bowtie(self):
        assert not is_simple(Polygon([(0, 0), (2, 2), (2, 0), (0, 1)]))
        assert is_simple(Polygon(make_square()))


class TestContours:
    """Tests for contour construction and merging."""

    def test_make_contour_counts_duplicates(self, rng):
        pts = rng.uniform(0, 1, size=(50, 2))
        pts = np.concatenate([pts, pts[:10]])
        contour = make_contour(pts, source_node=2, eps_hint=0.5)
        assert contour.point_count == 60
        assert contour.source_node == 2
        assert contour.eps_hint == 0.5
        assert contour.density == pytest.approx(60 / contour.polygon.area)

    def test_single_point_cluster(self, caplog):
        with caplog.at_level(logging.WARNING):
            contour = make_contour([(5.0, 5.0)] * 4, scale=10.0)
        assert contour.point_count == 4
        assert contour.polygon.bounds == pytest.approx((5 - 1e-5, 5 - 1e-5, 5 + 1e-5, 5 + 1e-5))
        assert "degenerate" in caplog.text

    def test_collinear_cluster_gets_thin_rectangle(self):
        contour = make_contour([(0, 0), (1, 1), (2, 2)], scale=1.0)
        xmin, ymin, xmax, ymax = contour.polygon.bounds
        assert xmin < 0 < 2 < xmax
        assert point_in_polygon((1.0, 1.0), contour.polygon) == Location.INSIDE

    def test_merge_is_order_independent(self):
        a = contour_around(make_square(), point_count=10, source_node=3)
        b = contour_around(make_square(0.5, 0.5), point_count=20, source_node=1)
        c = contour_around(make_square(1.2, 0.2), point_count=5, source_node=4)
        forward = merge_contours([a, b, c])
        backward = merge_contours([c, b, a])
        assert forward.polygon.vertex_set() == backward.polygon.vertex_set()
        assert forward.point_count == 35
        assert forward.source_node == 1

    def test_merge_covers_members(self):
        a = contour_around(make_square(), point_count=10)
        b = contour_around(make_square(0.5, 0.0), point_count=10)
        merged = merge_contours([a, b], lambda_norm=1.0)
        assert merged.polygon.area == pytest.approx(1.5)

    def test_merge_singleton_unchanged(self):
        a = contour_around(make_square())
        assert merge_contours([a]) is a

    def test_merge_keeps_largest_eps_hint(self):
        a = contour_around(make_square(), eps_hint=0.5)
        b = contour_around(make_square(0.5, 0.5), eps_hint=0.8)
        assert merge_contours([a, b]).eps_hint == 0.8


class TestContourFormat:
    """Tests for the point_count;density;WKT line format."""

    def test_polygon_to_wkt(self, unit_square):
        assert polygon_to_wkt(Polygon(unit_square)) == "POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"

    def test_format_contour_line(self, unit_square):
        line = format_contour_line(contour_around(unit_square, point_count=100))
        assert line == "100;100;POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"

    def test_parse_recomputes_density(self):
        contour = parse_contour_line("40;999;POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))")
        assert contour.point_count == 40
        assert contour.density == pytest.approx(10.0)

    @pytest.mark.parametrize(
        "line",
        [
            "40;POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))",
            "x;1;POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))",
            "40;1;LINESTRING (0 0, 1 1)",
            "40;1;POLYGON ((0 0, 1 1, 2 2, 0 0))",
        ],
    )
    def test_parse_errors(self, line):
        with pytest.raises(ParseError) as exc_info:
            parse_contour_line(line, "contours.wkt", 3)
        assert exc_info.value.line_number == 3

    def test_file_roundtrip(self, tmp_path):
        contours = [
            contour_around(make_square(), point_count=7),
            contour_around(make_square(5.0, 5.0, side=0.25), point_count=3),
        ]
        path = tmp_path / "contours.wkt"
        write_contours(path, contours)
        loaded = read_contours(path)
        assert [c.point_count for c in loaded] == [7, 3]
        assert loaded[1].polygon.vertex_set() == contours[1].polygon.vertex_set()

    def test_serialized_size(self, unit_square):
        contour = contour_around(unit_square)
        assert serialized_size([contour, contour]) == 2 * (len(format_contour_line(contour)) + 1)
