"""
Multi-scale analysis bookkeeping.
"""

from .scheduler import (
    LimitMass, build_schedule, ds_target, ils_constraint_check, ils_threshold, initial_mass,
    largeness_condition, limit_mass, min_feasible_p1, next_scale, p_sequence, radii_consistent,
    scale_sequence, scheduled_radii,
)

__all__ = [
    "LimitMass", "build_schedule", "ds_target", "ils_constraint_check", "ils_threshold",
    "initial_mass", "largeness_condition", "limit_mass", "min_feasible_p1", "next_scale",
    "p_sequence", "radii_consistent", "scale_sequence", "scheduled_radii",
]
