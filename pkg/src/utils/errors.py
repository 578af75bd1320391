"""
Error hierarchy for qgraph-loc.

Every error carries the exit code the command line reports when it escapes a run.
"""

from typing import Optional


class QGraphError(Exception):
    """Base exception for all library errors."""
    exit_code: int = 3


class ConfigurationError(QGraphError):
    """Invalid experiment configuration."""
    exit_code = 2

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


class AssertionFailure(QGraphError):
    """An assertable diagnostic did not hold."""
    exit_code = 1


class GeometryError(QGraphError):
    """Invalid box, index set or geometric precondition."""
    exit_code = 2


class GeometryOverflowError(GeometryError, OverflowError):
    """Combinatorial count exceeds the representable range."""


class NotDecomposableError(GeometryError):
    """Box is not decomposable along the requested partition."""


class ClusteringError(QGraphError):
    """Cube clustering failed to terminate."""


class MissingEdgeError(QGraphError, KeyError):
    """Disorder sample has no value for a required edge."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class MeshTooCoarseError(QGraphError):
    """Fewer than two subdivisions per unit edge."""
    exit_code = 2


class SolverFailureError(QGraphError):
    """Eigensolver or linear solver did not converge."""

    def __init__(self, message: str, best_residual: Optional[float] = None):
        self.best_residual = best_residual
        if best_residual is not None:
            message = f"{message} (best residual {best_residual:.3e})"
        super().__init__(message)


class ResonanceError(QGraphError):
    """Energy lies within tolerance of the spectrum."""

    def __init__(self, message: str, distance: Optional[float] = None):
        self.distance = distance
        super().__init__(message)


class InconclusiveError(QGraphError):
    """A certificate could not be produced with the available spectrum."""


class AccuracyError(QGraphError):
    """Requested accuracy could not be reached."""


class PreconditionError(QGraphError):
    """Operation called outside its mathematical preconditions."""
    exit_code = 2


class FeasibilityError(QGraphError):
    """Scale schedule violates a feasibility constraint."""
    exit_code = 1

    def __init__(self, constraint: str, index: Optional[int] = None, detail: str = ""):
        self.constraint = constraint
        self.index = index
        where = f" at index {index}" if index is not None else ""
        super().__init__(f"Infeasible: {constraint}{where}{': ' + detail if detail else ''}")
