"""
Tests for lattice combinatorics, separability and cube clustering.
"""

import numpy as np
import pytest

from src.geometry.clustering import cluster_cubes, is_R_connected
from src.geometry.lattice import (
    cell_distance, count_cubes, count_edges, count_sub_cubes, enumerate_cubes, enumerate_edges,
    full_projection, glue_nodes, out_layer, out_layer_size, sub_cubes,
)
from src.geometry.separability import (
    Interactivity, K, classify_interactive, decomposing_partition, distance_to_diagonal, r_nL,
    pre_separable_outside_related, separability, separability_audit, separable_far_field,
    separable_outside_related, separated_pair,
)
from src.models.geometry import BoxSpec, EdgeId
from src.utils.errors import GeometryError, GeometryOverflowError


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("L", [1, 2, 3])
def test_edge_count_matches_enumeration(d, L):
    """Closed-form edge count agrees with explicit enumeration."""
    assert count_edges(d, L) == len(enumerate_edges(d, L))


def test_edge_count_values():
    assert count_edges(1, 2) == 4
    assert count_edges(2, 3) == 60


def test_cube_count_matches_enumeration():
    box = BoxSpec.cube(((0,), (5,)), 2)
    assert count_cubes(2, 1, (2, 2)) == 16
    assert len(enumerate_cubes(box)) == 16


def test_cube_count_overflow():
    with pytest.raises(GeometryOverflowError):
        count_cubes(3, 3, (10 ** 6,) * 3)


def test_invalid_boxes_rejected():
    with pytest.raises(GeometryError):
        BoxSpec(center=((0,),), sides=(0,))
    with pytest.raises(GeometryError):
        BoxSpec(center=((0,), (0, 0)), sides=(1, 1))
    with pytest.raises(GeometryError):
        EdgeId((0, 0), 3)


def test_edge_address_is_stable():
    edge = EdgeId((-1, 0), 2)
    assert edge.address() == "-1,0|2"
    assert EdgeId.from_address(edge.address()) == edge
    assert edge.head == (-1, 1)


def test_cell_distance():
    assert cell_distance((0,), (5,)) == 3
    assert cell_distance((0, 0), (1, 1)) == 0


def test_out_layer_size():
    assert len(out_layer((0, 0), 8)) == out_layer_size(2, 1, 8) == 216
    with pytest.raises(GeometryError):
        out_layer((0,), 6)


def test_sub_cubes_are_counted():
    box = BoxSpec.cube(((0,), (0,)), 3)
    assert len(list(sub_cubes(box, 2))) == count_sub_cubes(box, 2) == 9


def test_glued_interval_has_shared_vertices():
    """Four edges of M=4 segments glue into a path of 17 nodes."""
    dofmap = glue_nodes(BoxSpec.cube(((0,),), 2), 4)
    assert dofmap.size == 17
    assert len(dofmap.cell_dofs((0,))) == 7


def test_full_projection_merges_overlaps():
    box = BoxSpec.cube(((0,), (1,)), 2)
    assert full_projection(box).merged_intervals() == [(-2, 3)]


def test_interactivity_classes():
    assert distance_to_diagonal(((0,), (10,))) == 5
    far = classify_interactive(((0,), (10,)), 2, 1)
    assert far.kind == Interactivity.PARTIALLY_INTERACTIVE
    assert far.partition == (0,)
    near = classify_interactive(((0,), (4,)), 2, 1)
    assert near.kind == Interactivity.FULLY_INTERACTIVE
    single = classify_interactive(((3,),), 2, 1)
    assert single.kind == Interactivity.FULLY_INTERACTIVE


def test_decomposing_partition():
    assert decomposing_partition(((0,), (10,)), 2, 1) == (0,)
    assert decomposing_partition(((0,), (3,)), 2, 1) is None


def test_separation_radius():
    assert r_nL(2, 2, 1) == 24
    assert r_nL(1, 5, 1) == 10
    assert K(3) == 27


def test_separated_pair_is_separable():
    first, second = separated_pair(2, 1, 2, 1)
    report = separability(first.center, second.center, 2, 1)
    assert report.separable
    assert report.distance == 48
    assert separable_far_field(first.center, second.center, 2, 1)


def test_outside_related_cubes_criteria():
    x, far = ((0,), (0,)), ((100,), (100,))
    assert pre_separable_outside_related(x, far, 1)
    assert separable_outside_related(x, far, 1, 1)
    assert not pre_separable_outside_related(x, x, 1)
    report = separability(x, far, 1, 1)
    assert report.pre_separable and report.separable


def test_overlapping_cubes_are_not_pre_separable():
    report = separability(((0,), (0,)), ((1,), (1,)), 2, 1)
    assert not report.pre_separable
    assert not report.separable


def test_separability_audit_small_grid():
    audit = separability_audit(2, 1, 1, 1, radius=4)
    assert audit.pairs == 81 * 81
    assert audit.pre_condition_hits > 0
    assert audit.far_field_hits > 0
    assert audit.pre_condition_contradictions == audit.sep_condition_contradictions == 0
    assert audit.far_field_contradictions == 0
    assert audit.separable_fi_not_complete == 0
    assert audit.passed


@pytest.mark.parametrize("d", [1, 2])
def test_far_field_pairs_are_separable(d):
    """x inside Λ_r(0) and y outside Λ_{2r}(0) always give separable cubes."""
    n, L, r0 = 2, 1, 1
    r = r_nL(n, L, r0)
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 500:
        x = rng.integers(-(r - 1), r, size=(n, d))
        y = rng.integers(-3 * r, 3 * r + 1, size=(n, d))
        if np.abs(y).max() < 2 * r:
            continue
        u, v = tuple(map(tuple, x.tolist())), tuple(map(tuple, y.tolist()))
        assert separable_far_field(u, v, L, r0)
        assert separability(u, v, L, r0).separable, (u, v)
        checked += 1


def test_cluster_cubes_merges_overlaps():
    clusters = cluster_cubes([(0,), (3,)], 2)
    assert len(clusters) == 1
    assert clusters[0].members == (0, 1)
    assert clusters[0].side == 18


def test_cluster_cubes_keeps_distant_cubes():
    clusters = cluster_cubes([(0,), (100,)], 2)
    assert [cl.members for cl in clusters] == [(0,), (1,)]
    assert all(cl.side == 9 for cl in clusters)


def test_r_connectedness():
    assert is_R_connected([(0,), (3,)], 2)
    assert not is_R_connected([(0,), (10,)], 2)


def test_cluster_cubes_on_random_inputs():
    """Clusters are disjoint, cover every input cube and have sides summing to k(L+7)."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        k, L = int(rng.integers(1, 7)), int(rng.integers(1, 4))
        centers = rng.integers(-40, 41, size=(k, n * d)).tolist()
        clusters = cluster_cubes(centers, L)
        unit = L + 7
        assert sorted(m for cl in clusters for m in cl.members) == list(range(k))
        assert sum(cl.side for cl in clusters) == k * unit
        for a, first in enumerate(clusters):
            assert first.side == len(first.members) * unit
            for m in first.members:
                reach = max(abs(c - w) for c, w in zip(centers[m], first.center))
                assert reach + L <= first.side - 7
            for second in clusters[a + 1:]:
                gap = max(abs(p - q) for p, q in zip(first.center, second.center))
                assert gap >= first.side + second.side
