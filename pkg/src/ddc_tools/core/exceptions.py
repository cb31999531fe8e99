"""Custom exception hierarchy for ddc-tools.

Exceptions are grouped by the layer that raises them. The CLI only needs
to tell configuration problems (exit code 2) apart from everything that
goes wrong while running (exit code 3).

Exception Hierarchy
===================

DDCError (base)
├── ConfigurationError - Invalid run configuration (also a ValueError)
│   ├── InvalidParamError - Invalid algorithm parameter
│   └── InvalidSpecError - Invalid dataset or shape spec
├── GeometryError
│   └── DegenerateInputError - Too few distinct points, or all collinear
├── ClusteringError
│   ├── MemoryBudgetExceededError - Distance matrix too large
│   └── EmptyFragmentError - Node received no points
├── EngineError
│   └── EmptyGroupError - Leader election on an empty group
├── DataIOError - File could not be read or written
│   └── ParseError - Malformed point/contour file
└── LengthMismatchError - Labelings of different lengths

All exceptions include a user_message attribute for display in the CLI.
"""


class DDCError(Exception):
    """Base exception for all ddc-tools errors.

    Attributes:
        message: Technical error message for logging
        user_message: User-friendly message for console display
    """

    def __init__(self, message: str, user_message: str | None = None):
        """Initialize exception with messages.

        Args:
            message: Technical error message
            user_message: User-friendly message (defaults to message if not provided)
        """
        super().__init__(message)
        self.message = message
        self.user_message = user_message or message


class ConfigurationError(DDCError, ValueError):
    """Raised when a run configuration cannot be used as given."""

    def __init__(self, message: str, user_message: str | None = None):
        super().__init__(
            message=message,
            user_message=user_message or f"Configuration error: {message}",
        )


class InvalidParamError(ConfigurationError):
    """Raised when an algorithm parameter is out of its valid range."""


class InvalidSpecError(ConfigurationError):
    """Raised when a dataset or shape specification is invalid."""


class GeometryError(DDCError):
    """Base class for computational geometry failures."""


class DegenerateInputError(GeometryError):
    """Raised when a point set cannot be triangulated.

    This happens with fewer than three distinct points or when every
    point lies on one line.
    """

    def __init__(self, message: str, n_distinct: int | None = None):
        super().__init__(message=message, user_message=f"Degenerate input: {message}")
        self.n_distinct = n_distinct


class ClusteringError(DDCError):
    """Base class for local clustering failures."""


class MemoryBudgetExceededError(ClusteringError):
    """Raised when the distance-matrix backend is asked for too many points."""

    def __init__(self, n_points: int, max_points: int):
        """Initialize memory budget error.

        Args:
            n_points: Number of points the caller asked to cluster
            max_points: Configured cap for the distance-matrix backend
        """
        message = f"Distance matrix over {n_points} points exceeds cap of {max_points}"
        user_message = (
            f"Too many points ({n_points}) for the distance-matrix backend "
            f"(cap {max_points}). Use the grid_index backend instead."
        )
        super().__init__(message=message, user_message=user_message)
        self.n_points = n_points
        self.max_points = max_points


class EmptyFragmentError(ClusteringError):
    """Raised when a node is asked to cluster an empty fragment."""

    def __init__(self, node_id: int):
        super().__init__(
            message=f"Fragment of node {node_id} is empty",
            user_message=f"Node {node_id} received no points. Use fewer nodes.",
        )
        self.node_id = node_id


class EngineError(DDCError):
    """Base class for aggregation-tree failures."""


class EmptyGroupError(EngineError):
    """Raised when a leader must be elected from an empty group."""


class DataIOError(DDCError):
    """Raised when a file cannot be read or written."""

    def __init__(self, message: str, user_message: str | None = None):
        super().__init__(
            message=message,
            user_message=user_message or f"I/O error: {message}",
        )


class ParseError(DataIOError):
    """Raised when a point or contour file contains a malformed line.

    Attributes:
        path: File being parsed
        line_number: 1-based line number of the offending line
    """

    def __init__(self, path: str, line_number: int, reason: str):
        message = f"{path}:{line_number}: {reason}"
        super().__init__(message=message, user_message=f"Parse error at {message}")
        self.path = path
        self.line_number = line_number
        self.reason = reason


class LengthMismatchError(DDCError):
    """Raised when two labelings that must align have different lengths."""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            message=f"Length mismatch: {expected} != {actual}",
            user_message=(
                f"Labelings have different lengths ({expected} vs {actual}); "
                "they must describe the same points."
            ),
        )
        self.expected = expected
        self.actual = actual
