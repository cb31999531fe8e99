"""Validation utilities for inputs and output locations.

These helpers run before any expensive work starts so that bad parameters
surface as typed errors instead of numpy warnings halfway through a run.
"""

import math
import os
from pathlib import Path

import numpy as np

from .exceptions import DataIOError, InvalidParamError


def as_points(points, name: str = "points") -> np.ndarray:
    """Convert an iterable of (x, y) pairs into a finite float64 (n, 2) array.

    Args:
        points: Sequence of coordinate pairs or an array of shape (n, 2)
        name: Argument name used in error messages

    Returns:
        Contiguous float64 array of shape (n, 2)

    Raises:
        InvalidParamError: If the shape is wrong or a coordinate is NaN/inf
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidParamError(f"{name} must have shape (n, 2), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidParamError(f"{name} contains NaN or infinite coordinates")
    return np.ascontiguousarray(arr)


def require_positive(value: float, name: str) -> None:
    """Raise InvalidParamError unless value is a finite number > 0."""
    if value is None or not math.isfinite(value) or value <= 0:
        raise InvalidParamError(f"{name} must be a finite number > 0, got {value!r}")


def require_at_least(value: int, minimum: int, name: str) -> None:
    """Raise InvalidParamError unless value is an integer >= minimum."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidParamError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParamError(f"{name} must be at least {minimum}, got {value}")


def require_unit_interval(value: float, name: str) -> None:
    """Raise InvalidParamError unless 0 <= value <= 1."""
    if value is None or not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidParamError(f"{name} must lie in [0, 1], got {value!r}")


def validate_output_directory(path: Path, create: bool = True) -> Path:
    """Validate that an output directory exists (or can be created) and is writable.

    Args:
        path: Directory path to validate
        create: Create the directory (and parents) when it does not exist

    Returns:
        The directory as a Path

    Raises:
        DataIOError: If the directory is invalid or not writable
    """
    path = Path(path)

    if not path.exists():
        if not create:
            raise DataIOError(
                f"Output directory does not exist: {path}",
                user_message=f"Output directory not found: {path}",
            )
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DataIOError(
                f"Failed to create output directory {path}: {e}",
                user_message=f"Cannot create output directory: {path}",
            ) from e

    if not path.is_dir():
        raise DataIOError(
            f"Output path is not a directory: {path}",
            user_message=f"Output path must be a directory: {path}",
        )

    if not os.access(path, os.W_OK):
        raise DataIOError(
            f"Output directory is not writable: {path}",
            user_message=f"Cannot write to output directory: {path}. Check permissions.",
        )

    return path
