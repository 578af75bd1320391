"""
Geometry of the n-particle lattice cube complex.
"""

from .lattice import (
    BoxUnion, box_edges, cell_distance, complex_summary, count_cubes, count_edges,
    count_sub_cubes, enumerate_cubes, enumerate_edges, glue_nodes, out_layer,
    out_layer_size, projections, sub_cubes, sup_distance, unflatten,
)
from .separability import (
    Interactivity, InteractivityReport, K, SeparabilityReport, classify_interactive,
    decomposing_partition, distance_to_diagonal, pre_separable_outside_related, related_points, r_nL,
    separability, separability_audit, separable_far_field, separable_outside_related, separated_pair,
)
from .clustering import Cluster, cluster_cubes, is_R_connected

__all__ = [
    "BoxUnion", "box_edges", "cell_distance", "complex_summary", "count_cubes",
    "count_edges", "count_sub_cubes", "enumerate_cubes", "enumerate_edges", "glue_nodes",
    "out_layer", "out_layer_size", "projections", "sub_cubes", "sup_distance", "unflatten",
    "Interactivity", "InteractivityReport", "K", "SeparabilityReport",
    "classify_interactive", "decomposing_partition", "distance_to_diagonal",
    "pre_separable_outside_related", "related_points", "r_nL", "separability", "separability_audit",
    "separable_far_field", "separable_outside_related", "separated_pair",
    "Cluster", "cluster_cubes", "is_R_connected",
]
