"""Errors raised by the change faithfulness toolkit."""

from __future__ import annotations


class FaithfulnessError(Exception):
    """Base exception for change faithfulness errors."""


class InvalidGraphError(FaithfulnessError):
    """A time slice or dynamic pair violates its structural invariants."""


class DisconnectedGraphError(FaithfulnessError):
    """A distance computation was asked for on a disconnected slice."""

    def __init__(self, component: list[int], component_count: int) -> None:
        """Initialize with the first component not containing vertex 0."""
        self.component = component
        self.component_count = component_count
        preview = ", ".join(str(v) for v in component[:10])
        if len(component) > 10:
            preview += ", ..."
        super().__init__(
            f"Graph has {component_count} connected components; "
            f"vertices [{preview}] are unreachable from vertex 0"
        )


class DegenerateDrawingError(FaithfulnessError):
    """A drawing has no extent where one is required."""


class SizeMismatchError(FaithfulnessError):
    """Two objects that must cover the same vertex set do not."""


class TooFewPointsError(FaithfulnessError):
    """k-means was asked for more clusters than distinct points."""


class InvalidSpecError(FaithfulnessError):
    """A generator recipe or option set has invalid values."""


class InfeasibleSpecError(FaithfulnessError):
    """A generator could not meet its targets in bounded attempts."""


class LayoutNotFaithfulError(FaithfulnessError):
    """A cluster faithful layout could not be verified after retries."""


class InvalidEdgeSetError(FaithfulnessError):
    """Deformation edge sets overlap or contain non-edges."""


class MissingCoordinatesError(FaithfulnessError):
    """A coordinate source does not cover every vertex."""


class ParseError(FaithfulnessError):
    """An input file is malformed."""


class EmptyTraceError(FaithfulnessError):
    """An experiment trace has nothing to write."""


class StorageError(FaithfulnessError):
    """Reading or writing a file failed."""
