from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np

from src.utils.errors import GeometryError

Point = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class EdgeId:
    """Unit edge of the lattice from `base` to `base + h_dir` (dir is 1-based)."""
    base: Point
    dir: int

    def __post_init__(self):
        if not 1 <= self.dir <= len(self.base):
            raise GeometryError(f"Edge direction {self.dir} outside [1, {len(self.base)}]")

    @property
    def d(self) -> int:
        return len(self.base)

    @property
    def head(self) -> Point:
        return tuple(b + (1 if k == self.dir - 1 else 0) for k, b in enumerate(self.base))

    def address(self) -> str:
        """Canonical text address, e.g. `-1,0|2`."""
        return ",".join(str(b) for b in self.base) + f"|{self.dir}"

    @classmethod
    def from_address(cls, text: str) -> "EdgeId":
        base, direction = text.strip().split("|")
        return cls(tuple(int(b) for b in base.split(",")), int(direction))


@dataclass(frozen=True, order=True)
class CubeId:
    """Unit n-cube of the complex, one edge per particle."""
    edges: Tuple[EdgeId, ...]

    def __post_init__(self):
        if len(self.edges) < 1:
            raise GeometryError("A cube needs at least one edge")

    @property
    def n(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class BoxSpec:
    """n-rectangle of open sup-norm 1-boxes: product of Λ_{L_j}(u_j)."""
    center: Tuple[Point, ...]
    sides: Tuple[int, ...]

    def __post_init__(self):
        if len(self.center) < 1:
            raise GeometryError("Box needs at least one particle")
        if len(self.sides) != len(self.center):
            raise GeometryError(f"Got {len(self.sides)} sides for {len(self.center)} particles")
        dims = {len(u) for u in self.center}
        if len(dims) != 1 or 0 in dims:
            raise GeometryError("All particle centers must share one positive dimension")
        if any(int(L) < 1 for L in self.sides):
            raise GeometryError(f"Half-sides must be >= 1, got {self.sides}")

    @classmethod
    def cube(cls, center, L: int) -> "BoxSpec":
        """Cube box with equal half-sides around `center` (n x d nested ints)."""
        center = tuple(tuple(int(c) for c in u) for u in center)
        return cls(center=center, sides=(int(L),) * len(center))

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def d(self) -> int:
        return len(self.center[0])

    @property
    def is_cube(self) -> bool:
        return len(set(self.sides)) == 1

    @property
    def L(self) -> int:
        if not self.is_cube:
            raise GeometryError(f"Box with sides {self.sides} is not a cube")
        return self.sides[0]

    def flat_center(self) -> np.ndarray:
        return np.array([c for u in self.center for c in u], dtype=np.int64)

    def volume(self) -> int:
        """|Λ| = product of (2L_j)^d."""
        vol = 1
        for L in self.sides:
            vol *= (2 * L) ** self.d
        return vol

    def factor(self, indices: Tuple[int, ...]) -> "BoxSpec":
        """Sub-product over the given particle indices."""
        return BoxSpec(
            center=tuple(self.center[i] for i in indices),
            sides=tuple(self.sides[i] for i in indices),
        )

    def to_dict(self) -> Dict[str, List]:
        return {"center": [list(u) for u in self.center], "sides": list(self.sides)}


@dataclass(frozen=True)
class Vertex:
    """Node coordinate sitting on a lattice vertex."""
    point: Point

    def sort_key(self) -> tuple:
        return (0, self.point, 0, 0)

    def scaled_position(self, M: int) -> Point:
        return tuple(M * p for p in self.point)


@dataclass(frozen=True)
class EdgePoint:
    """Node coordinate strictly inside an edge at grid index t in (0, M)."""
    edge: EdgeId
    t: int

    def sort_key(self) -> tuple:
        return (1, self.edge.base, self.edge.dir, self.t)

    def scaled_position(self, M: int) -> Point:
        return tuple(
            M * b + (self.t if k == self.edge.dir - 1 else 0)
            for k, b in enumerate(self.edge.base)
        )


NodeEntry = Union[Vertex, EdgePoint]
NodeKey = Tuple[NodeEntry, ...]


def node_sort_key(node: NodeKey) -> tuple:
    return tuple(entry.sort_key() for entry in node)


@dataclass
class DofMap:
    """Dense numbering of the glued nodes of a box complex."""
    box: BoxSpec
    M: int
    nodes: List[NodeKey]
    cubes: List[CubeId]
    cube_dofs: np.ndarray
    scaled_positions: np.ndarray
    decoupled: bool = False
    index: Dict[NodeKey, int] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def positions(self) -> np.ndarray:
        """Geometric node positions in R^{nd}."""
        return self.scaled_positions / float(self.M)

    def cell_dofs(self, x) -> np.ndarray:
        """DOFs whose position lies in the open unit-radius cell around lattice point x."""
        target = self.M * np.asarray(x, dtype=np.int64).reshape(-1)
        dist = np.abs(self.scaled_positions - target).max(axis=1)
        return np.nonzero(dist < self.M)[0]
