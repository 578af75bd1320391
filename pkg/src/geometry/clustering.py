"""
Merging of overlapping cubes into disjoint enclosing cubes, and R-connectedness.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import networkx as nx
import numpy as np

from src.utils.errors import AssertionFailure, ClusteringError, GeometryError

logger = logging.getLogger("lattice.clustering")

ENLARGEMENT = 7


@dataclass(frozen=True)
class Cluster:
    """Enclosing cube Λ_side(center) of `members` input cubes (indices into the input)."""
    center: Tuple[int, ...]
    side: int
    members: Tuple[int, ...]


def _overlap_graph(centers: np.ndarray, sides: np.ndarray) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(centers)))
    for i in range(len(centers)):
        dist = np.abs(centers[i + 1:] - centers[i]).max(axis=1)
        for offset in np.nonzero(dist < sides[i + 1:] + sides[i])[0]:
            graph.add_edge(i, i + 1 + int(offset))
    return graph


def cluster_cubes(centers: Sequence[Sequence[int]], L: int) -> List[Cluster]:
    """
    Enclose k cubes Λ_L(u_r) in pairwise disjoint cubes Λ_{l_j}.

    Start from the enlarged cubes Λ_{L+7}(u_r) and repeatedly replace each
    connected group of overlapping cubes by one cube whose side is the sum of the
    group's sides, centred at the floor midpoint of the group's bounding box.
    """
    if len(centers) < 1:
        raise GeometryError("cluster_cubes needs at least one cube")
    inputs = np.array([[int(c) for c in u] for u in centers], dtype=np.int64)
    k = len(inputs)
    unit = L + ENLARGEMENT

    cur_centers = inputs.copy()
    cur_sides = np.full(k, unit, dtype=np.int64)
    cur_members: List[Tuple[int, ...]] = [(r,) for r in range(k)]

    iterations = 0
    while True:
        graph = _overlap_graph(cur_centers, cur_sides)
        if graph.number_of_edges() == 0:
            break
        iterations += 1
        if iterations > k:
            raise ClusteringError(f"Cube clustering did not settle after {k} merge rounds")
        new_centers, new_sides, new_members = [], [], []
        for component in nx.connected_components(graph):
            idx = sorted(component)
            lo = (cur_centers[idx] - cur_sides[idx, None]).min(axis=0)
            hi = (cur_centers[idx] + cur_sides[idx, None]).max(axis=0)
            new_centers.append((lo + hi) // 2)
            new_sides.append(int(cur_sides[idx].sum()))
            new_members.append(tuple(sorted(m for i in idx for m in cur_members[i])))
        cur_centers = np.array(new_centers, dtype=np.int64)
        cur_sides = np.array(new_sides, dtype=np.int64)
        cur_members = new_members

    clusters = [
        Cluster(tuple(int(c) for c in center), int(side), members)
        for center, side, members in zip(cur_centers, cur_sides, cur_members)
    ]
    clusters.sort(key=lambda cl: min(tuple(inputs[m]) for m in cl.members))
    _assert_cluster_clauses(clusters, inputs, L)
    logger.debug(f"Clustered {k} cubes into {len(clusters)} after {iterations} rounds")
    return clusters


def _assert_cluster_clauses(clusters: List[Cluster], inputs: np.ndarray, L: int) -> None:
    unit = L + ENLARGEMENT
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            gap = max(abs(x - y) for x, y in zip(clusters[a].center, clusters[b].center))
            if gap < clusters[a].side + clusters[b].side:
                raise AssertionFailure(f"Clusters {a} and {b} overlap")
    for cl in clusters:
        if cl.side != len(cl.members) * unit:
            raise AssertionFailure(f"Cluster side {cl.side} != {len(cl.members)} x {unit}")
        for m in cl.members:
            reach = int(np.abs(inputs[m] - np.array(cl.center)).max())
            if reach > cl.side - ENLARGEMENT - L:
                raise AssertionFailure(f"Input cube {m} not covered by Λ_{cl.side - ENLARGEMENT}")
    if sum(cl.side for cl in clusters) != len(inputs) * unit:
        raise AssertionFailure("Cluster sides do not sum to k(L+7)")


def is_R_connected(points: Sequence[Sequence[int]], R: int) -> bool:
    """True iff the union of the open cubes Λ_R(y_j) is connected."""
    if len(points) < 1:
        raise GeometryError("is_R_connected needs a nonempty point set")
    pts = np.array([[int(c) for c in p] for p in points], dtype=np.int64)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(pts)))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.abs(pts[i] - pts[j]).max() < 2 * R:
                graph.add_edge(i, j)
    connected = nx.is_connected(graph)
    if connected and len(pts) >= 2:
        spread = int(np.abs(pts[:, None, :] - pts[None, :, :]).max())
        if spread >= (len(pts) - 1) * 2 * R:
            raise AssertionFailure(f"R-connected set has spread {spread} >= {(len(pts) - 1) * 2 * R}")
    return connected
