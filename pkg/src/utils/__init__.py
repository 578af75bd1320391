"""
Utilities for qgraph-loc

Error hierarchy, counter-based seeding and the trial worker pool. Import the
seeding and pool helpers from their modules; only the errors are re-exported.
"""

from .errors import ConfigurationError, QGraphError

__all__ = ["ConfigurationError", "QGraphError"]
