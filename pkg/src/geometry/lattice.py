"""
Lattice combinatorics of the n-particle cube complex.

Boxes are open sup-norm cubes. A box contains an edge iff the open edge meets
it; the closure adds the boundary vertices. Particle indices are 0-based.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.models.geometry import (
    BoxSpec, CubeId, DofMap, EdgeId, EdgePoint, NodeKey, Point, Vertex, node_sort_key,
)
from src.utils.errors import GeometryError, GeometryOverflowError, MeshTooCoarseError

logger = logging.getLogger("lattice")

MAX_COUNT = 2 ** 63 - 1
OUT_LAYER_WIDTH = 6


def _checked(value: int, what: str) -> int:
    if value > MAX_COUNT:
        raise GeometryOverflowError(f"{what} = {value} exceeds 64-bit range")
    return value


def count_edges(d: int, L: int) -> int:
    """Number of edges of the lattice graph inside Λ_L: d(2L)(2L-1)^{d-1}."""
    if d < 1 or L < 1:
        raise GeometryError(f"count_edges needs d >= 1 and L >= 1, got d={d}, L={L}")
    return _checked(d * (2 * L) * (2 * L - 1) ** (d - 1), "edge count")


def count_cubes(n: int, d: int, sides: Sequence[int]) -> int:
    """Number of n-cubes in a box with the given half-sides."""
    if n < 1 or len(sides) != n:
        raise GeometryError(f"count_cubes needs n >= 1 sides, got n={n}, sides={tuple(sides)}")
    total = 1
    for L in sides:
        total = _checked(total * count_edges(d, L), "cube count")
    return total


def enumerate_edges(d: int, L: int, center: Optional[Point] = None) -> List[EdgeId]:
    """All edges of Γ ∩ Λ_L(center), sorted."""
    if d < 1 or L < 1:
        raise GeometryError(f"enumerate_edges needs d >= 1 and L >= 1, got d={d}, L={L}")
    center = tuple(center) if center is not None else (0,) * d
    edges = []
    for j in range(1, d + 1):
        ranges = [
            range(c - L, c + L) if k == j - 1 else range(c - L + 1, c + L)
            for k, c in enumerate(center)
        ]
        edges.extend(EdgeId(tuple(p), j) for p in itertools.product(*ranges))
    return sorted(edges)


def enumerate_cubes(box: BoxSpec) -> List[CubeId]:
    """All cubes (e_1, ..., e_n) with e_i an edge of Γ ∩ Λ_{L_i}(u_i)."""
    per_particle = [enumerate_edges(box.d, L, u) for u, L in zip(box.center, box.sides)]
    return [CubeId(edges) for edges in itertools.product(*per_particle)]


def box_edges(box: BoxSpec) -> List[EdgeId]:
    """Union of the 1-particle edges touched by a box, sorted."""
    edges = set()
    for u, L in zip(box.center, box.sides):
        edges.update(enumerate_edges(box.d, L, u))
    return sorted(edges)


def _entry(edge: EdgeId, t: int, M: int):
    if t == 0:
        return Vertex(edge.base)
    if t == M:
        return Vertex(edge.head)
    return EdgePoint(edge, t)


def _scaled_position(node: NodeKey, M: int) -> Tuple[int, ...]:
    return tuple(c for entry in node for c in entry.scaled_position(M))


@lru_cache(maxsize=64)
def glue_nodes(box: BoxSpec, M: int, decoupled: bool = False) -> DofMap:
    """
    Number the mesh nodes of the box complex.

    Each cube carries an (M+1)^n tensor grid. Local coordinates at 0 or M collapse
    to Vertex entries, so cubes sharing a vertex or face share the node. With
    `decoupled` every cube keeps private nodes (faces cut).
    """
    if M < 2:
        raise MeshTooCoarseError(f"Mesh needs M >= 2 subdivisions, got {M}")
    cubes = enumerate_cubes(box)
    local = list(itertools.product(range(M + 1), repeat=box.n))
    cube_keys = [
        [tuple(_entry(e, t, M) for e, t in zip(cube.edges, loc)) for loc in local]
        for cube in cubes
    ]

    if decoupled:
        nodes = [(c,) + key for c, keys in enumerate(cube_keys) for key in keys]
        scaled = [_scaled_position(node[1:], M) for node in nodes]
        cube_dofs = np.arange(len(nodes), dtype=np.int64).reshape(len(cubes), len(local))
        index = {node: i for i, node in enumerate(nodes)}
    else:
        unique = {key for keys in cube_keys for key in keys}
        nodes = sorted(unique, key=node_sort_key)
        index = {node: i for i, node in enumerate(nodes)}
        cube_dofs = np.array([[index[key] for key in keys] for keys in cube_keys], dtype=np.int64)
        scaled = [_scaled_position(node, M) for node in nodes]

    logger.debug(f"Glued {len(cubes)} cubes into {len(nodes)} DOFs (M={M}, decoupled={decoupled})")
    return DofMap(
        box=box,
        M=M,
        nodes=nodes,
        cubes=cubes,
        cube_dofs=cube_dofs,
        scaled_positions=np.array(scaled, dtype=np.int64).reshape(len(nodes), box.n * box.d),
        decoupled=decoupled,
        index=index,
    )


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of open d-dimensional sup-norm boxes (center, half-side)."""
    boxes: Tuple[Tuple[Point, int], ...]

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def intersects(self, other: "BoxUnion") -> bool:
        for (c1, l1), (c2, l2) in itertools.product(self.boxes, other.boxes):
            if max(abs(a - b) for a, b in zip(c1, c2)) < l1 + l2:
                return True
        return False

    def union(self, other: "BoxUnion") -> "BoxUnion":
        return BoxUnion(tuple(sorted(set(self.boxes) | set(other.boxes))))

    def merged_intervals(self) -> List[Tuple[int, int]]:
        """Open intervals of a 1-D union with overlapping pieces merged."""
        if self.boxes and len(self.boxes[0][0]) != 1:
            raise GeometryError("Interval merge is only defined for d = 1")
        merged: List[List[int]] = []
        for lo, hi in sorted((c[0] - l, c[0] + l) for c, l in self.boxes):
            if merged and lo < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [(lo, hi) for lo, hi in merged]


def projections(box: BoxSpec, J: Sequence[int]) -> BoxUnion:
    """Π_J Λ: union of the 1-particle boxes Λ_{L_j}(u_j), j in J."""
    for j in J:
        if not 0 <= j < box.n:
            raise GeometryError(f"Particle index {j} out of range for n={box.n}")
    return BoxUnion(tuple(sorted({(box.center[j], box.sides[j]) for j in J})))


def full_projection(box: BoxSpec) -> BoxUnion:
    return projections(box, range(box.n))


def out_layer_size(n: int, d: int, L: int) -> int:
    """|B_L^out| = (2L-1)^{nd} - (2L-13)^{nd}."""
    if L <= OUT_LAYER_WIDTH:
        raise GeometryError(f"Out-layer needs L >= 7, got {L}")
    return (2 * L - 1) ** (n * d) - (2 * L - 1 - 2 * OUT_LAYER_WIDTH) ** (n * d)


def out_layer(center: Sequence[int], L: int) -> List[Tuple[int, ...]]:
    """Lattice points of Λ_L(center) \\ Λ_{L-6}(center), lexicographic."""
    if L <= OUT_LAYER_WIDTH:
        raise GeometryError(f"Out-layer needs L >= 7, got {L}")
    center = tuple(int(c) for c in center)
    points = []
    for offset in itertools.product(range(-(L - 1), L), repeat=len(center)):
        if max(abs(o) for o in offset) >= L - OUT_LAYER_WIDTH:
            points.append(tuple(c + o for c, o in zip(center, offset)))
    return points


def count_sub_cubes(box: BoxSpec, ell: int) -> int:
    return (2 * (box.L - ell) + 1) ** (box.n * box.d)


def sub_cubes(box: BoxSpec, ell: int) -> Iterator[BoxSpec]:
    """All cubes Λ_ell(w) contained in the cube box, lexicographic in w."""
    L = box.L
    if not 1 <= ell <= L:
        raise GeometryError(f"Sub-cube side {ell} outside [1, {L}]")
    flat = box.flat_center()
    span = range(-(L - ell), L - ell + 1)
    for offset in itertools.product(span, repeat=len(flat)):
        w = flat + np.array(offset, dtype=np.int64)
        yield BoxSpec.cube(unflatten(w, box.n, box.d), ell)


def unflatten(flat: Sequence[int], n: int, d: int) -> Tuple[Point, ...]:
    flat = [int(c) for c in flat]
    return tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(n))


def sup_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return int(max(abs(int(x) - int(y)) for x, y in zip(a, b)))


def cell_distance(x: Sequence[int], y: Sequence[int]) -> int:
    """Distance between the open unit-radius cells around x and y."""
    return max(0, sup_distance(x, y) - 2)


def complex_summary(box: BoxSpec, M: int) -> Dict[str, Any]:
    """JSON-ready description of a box complex."""
    dofmap = glue_nodes(box, M)
    faces = set()
    for cube in dofmap.cubes:
        for k, edge in enumerate(cube.edges):
            for end in (Vertex(edge.base), Vertex(edge.head)):
                faces.add(cube.edges[:k] + (end,) + cube.edges[k + 1:])
    multiplicity = np.bincount(dofmap.cube_dofs.ravel(), minlength=dofmap.size)
    return {
        "box": box.to_dict(),
        "n": box.n,
        "d": box.d,
        "M": M,
        "cubes": len(dofmap.cubes),
        "faces": len(faces),
        "dofs": dofmap.size,
        "shared_dofs": int((multiplicity > 1).sum()),
        "max_sharing": int(multiplicity.max()),
        "volume": box.volume(),
    }
