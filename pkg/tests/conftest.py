"""pytest configuration and shared fixtures."""

import numpy as np
import pytest

from ddc_tools.core.data import Dataset, DatasetSpec, ShapeSpec, generate
from ddc_tools.core.geometry import Contour, Polygon


def make_square(x0=0.0, y0=0.0, side=1.0):
    """Factory for an axis-aligned square ring."""
    return [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]


def make_contour(ring, point_count=100, source_node=0, eps_hint=None):
    """Factory for a Contour around a ring."""
    return Contour.from_polygon(Polygon(ring), point_count, source_node=source_node, eps_hint=eps_hint)


def make_spec(shapes=None, noise_fraction=0.0, bbox=None, seed=0, name="test"):
    """Factory for a small two-disk DatasetSpec."""
    if shapes is None:
        shapes = [
            ShapeSpec("disk", 400, center=(10.0, 10.0), params={"radius": 3.0}),
            ShapeSpec("disk", 400, center=(30.0, 10.0), params={"radius": 3.0}),
        ]
    return DatasetSpec(tuple(shapes), noise_fraction=noise_fraction, bbox=bbox, seed=seed, name=name)


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(42)


@pytest.fixture
def unit_square():
    return make_square()


@pytest.fixture
def two_disks() -> Dataset:
    """Two well-separated dense disks (800 points, no noise)."""
    return generate(make_spec())


@pytest.fixture
def three_blobs() -> Dataset:
    """Three separated disks in a row plus a little background noise."""
    spec = make_spec(
        shapes=[
            ShapeSpec("disk", 600, center=(10.0, 10.0), params={"radius": 3.0}),
            ShapeSpec("disk", 600, center=(30.0, 10.0), params={"radius": 3.0}),
            ShapeSpec("disk", 600, center=(50.0, 10.0), params={"radius": 3.0}),
        ],
        noise_fraction=0.02,
        bbox=(0.0, 0.0, 60.0, 20.0),
        name="three_blobs",
    )
    return generate(spec)
