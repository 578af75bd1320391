"""
Eigenvalues, resolvents and semigroups of assembled operators.
"""

from .engine import (
    GreenFunction, b_norm, count_below, dist_to_spectrum, dyn_moment, eigs_up_to, full_spectrum,
    green_block_norm, lowest_eigs, semigroup_pair, spectral_projector_apply, weyl_constant,
)

__all__ = [
    "GreenFunction", "b_norm", "count_below", "dist_to_spectrum", "dyn_moment", "eigs_up_to",
    "full_spectrum", "green_block_norm", "lowest_eigs", "semigroup_pair",
    "spectral_projector_apply", "weyl_constant",
]
