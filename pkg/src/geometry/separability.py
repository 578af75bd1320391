"""
Interactivity and separability predicates for n-particle cubes.

Cube centers are given as n-tuples of d-dimensional lattice points.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.geometry.lattice import BoxUnion, sup_distance
from src.models.geometry import BoxSpec, Point
from src.utils.errors import GeometryError

logger = logging.getLogger("lattice.separability")

Center = Tuple[Point, ...]


class Interactivity(str, Enum):
    PARTIALLY_INTERACTIVE = "PI"
    FULLY_INTERACTIVE = "FI"


@dataclass(frozen=True)
class InteractivityReport:
    kind: Interactivity
    distance_to_diagonal: int
    threshold: int
    partition: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class SeparabilityReport:
    pre_separable: bool
    partition: Optional[Tuple[int, ...]]
    orientation: Optional[str]
    separable: bool
    completely_separated: bool
    distance: int
    r_nL: int


def K(n: int) -> int:
    """Upper bound n^n on the number of related points."""
    return n ** n


def r_nL(n: int, L: int, r0: int) -> int:
    """Separation radius 4(n-1)(2L+r0) + 2L."""
    return 4 * (n - 1) * (2 * L + r0) + 2 * L


def _as_center(u) -> Center:
    return tuple(tuple(int(c) for c in p) for p in u)


def distance_to_diagonal(u) -> int:
    """Sup-norm distance from u to the diagonal {(x, ..., x)}, by finite search."""
    u = _as_center(u)
    best = 0
    for coords in zip(*u):
        lo, hi = min(coords), max(coords)
        best = max(best, min(max(abs(c - x) for c in coords) for x in range(lo, hi + 1)))
    return best


def set_distance(points_a: Sequence[Point], points_b: Sequence[Point]) -> int:
    return min(sup_distance(a, b) for a in points_a for b in points_b)


def decomposing_partition(u, L: int, r0: int) -> Optional[Tuple[int, ...]]:
    """First proper J containing particle 0 with dist(u_J, u_{J^c}) >= 2L + r0."""
    u = _as_center(u)
    n = len(u)
    rest = range(1, n)
    for size in range(0, n - 1):
        for extra in itertools.combinations(rest, size):
            J = (0,) + extra
            Jc = [i for i in range(n) if i not in J]
            if set_distance([u[i] for i in J], [u[i] for i in Jc]) >= 2 * L + r0:
                return J
    return None


def classify_interactive(u, L: int, r0: int) -> InteractivityReport:
    """PI iff dist(u, D) >= (n-1)(2L+r0); one-particle cubes are FI."""
    u = _as_center(u)
    n = len(u)
    threshold = (n - 1) * (2 * L + r0)
    if n == 1:
        return InteractivityReport(Interactivity.FULLY_INTERACTIVE, 0, threshold)
    dist = distance_to_diagonal(u)
    if dist < threshold:
        return InteractivityReport(Interactivity.FULLY_INTERACTIVE, dist, threshold)
    J = decomposing_partition(u, L, r0)
    if J is None:
        raise GeometryError(f"PI cube at {u} has no decomposing partition")
    return InteractivityReport(Interactivity.PARTIALLY_INTERACTIVE, dist, threshold, J)


def related_points(x) -> List[Center]:
    """All n-tuples with entries drawn from the distinct coordinates of x."""
    x = _as_center(x)
    distinct = sorted(set(x))
    return sorted(itertools.product(distinct, repeat=len(x)))


def _boxes_overlap(c1: Point, l1: int, c2: Point, l2: int) -> bool:
    return sup_distance(c1, c2) < l1 + l2


def _j_pre_separable(u: Center, L: int, v: Center, Kside: int, J: Sequence[int]) -> bool:
    """Π_J Λ_L(u) ∩ (Π_{J^c} Λ_L(u) ∪ Π Λ_K(v)) = ∅."""
    own = BoxUnion(tuple((u[i], L) for i in J))
    rest = BoxUnion(tuple((u[k], L) for k in range(len(u)) if k not in J))
    rest = rest.union(BoxUnion(tuple((w, Kside) for w in v)))
    return rest.is_empty or not own.intersects(rest)


def pre_separable_partition(u, L: int, v, Kside: Optional[int] = None) -> Optional[Tuple[Tuple[int, ...], str]]:
    """A (J, orientation) witnessing pre-separability, or None."""
    u, v = _as_center(u), _as_center(v)
    Kside = L if Kside is None else Kside
    for size in range(1, len(u) + 1):
        for J in itertools.combinations(range(len(u)), size):
            if _j_pre_separable(u, L, v, Kside, J):
                return J, "first"
    for size in range(1, len(v) + 1):
        for J in itertools.combinations(range(len(v)), size):
            if _j_pre_separable(v, Kside, u, L, J):
                return J, "second"
    return None


def _flat(u: Center) -> List[int]:
    return [c for p in u for c in p]


def separability(u, v, L: int, r0: int) -> SeparabilityReport:
    """Pre-separability, separability and complete separation of Λ_L(u), Λ_L(v)."""
    u, v = _as_center(u), _as_center(v)
    if len(u) != len(v):
        raise GeometryError("Separability compares cubes with the same particle number")
    n = len(u)
    witness = pre_separable_partition(u, L, v)
    dist = sup_distance(_flat(u), _flat(v))
    radius = r_nL(n, L, r0)
    disjoint = not any(_boxes_overlap(a, L, b, L) for a in u for b in v)
    return SeparabilityReport(
        pre_separable=witness is not None,
        partition=witness[0] if witness else None,
        orientation=witness[1] if witness else None,
        separable=witness is not None and dist >= radius,
        completely_separated=disjoint and dist >= radius,
        distance=dist,
        r_nL=radius,
    )


def outside_related_cubes(y, x, radius: int) -> bool:
    """y lies outside every Λ_radius(x^(j)) over the related points of x."""
    flat_y = _flat(_as_center(y))
    return all(sup_distance(flat_y, _flat(p)) >= radius for p in related_points(x))


def pre_separable_outside_related(x, y, L: int) -> bool:
    """Sufficient condition: y outside the Λ_{2nL} cubes around the related points of x."""
    return outside_related_cubes(y, x, 2 * len(_as_center(x)) * L)


def separable_outside_related(x, y, L: int, r0: int) -> bool:
    """Sufficient condition: y outside the Λ_{r_{n,L}} cubes around the related points of x."""
    x = _as_center(x)
    return outside_related_cubes(y, x, r_nL(len(x), L, r0))


def separable_far_field(x, y, L: int, r0: int) -> bool:
    """Sufficient condition: |x| < r_{n,L} and |y| >= 2 r_{n,L}."""
    x, y = _as_center(x), _as_center(y)
    r = r_nL(len(x), L, r0)
    return max(map(abs, _flat(x))) < r and max(map(abs, _flat(y))) >= 2 * r


def separated_pair(n: int, d: int, L: int, r0: int) -> Tuple[BoxSpec, BoxSpec]:
    """A separable pair of cubes from the far-field rule: all particles at 0 vs at 2r e_1."""
    r = r_nL(n, L, r0)
    origin = tuple((0,) * d for _ in range(n))
    far = tuple((2 * r,) + (0,) * (d - 1) for _ in range(n))
    return BoxSpec.cube(origin, L), BoxSpec.cube(far, L)


@dataclass
class SeparabilityAudit:
    """Counts from an exhaustive check of the separability criteria on a center grid."""
    pairs: int = 0
    pre_condition_hits: int = 0
    pre_condition_contradictions: int = 0
    sep_condition_hits: int = 0
    sep_condition_contradictions: int = 0
    far_field_hits: int = 0
    far_field_contradictions: int = 0
    separable_fi_pairs: int = 0
    separable_fi_not_complete: int = 0

    @property
    def passed(self) -> bool:
        return (
            self.pre_condition_contradictions == 0
            and self.sep_condition_contradictions == 0
            and self.far_field_contradictions == 0
            and self.separable_fi_not_complete == 0
        )


def _grid(n: int, d: int, radius: int, exclude_below: int = 0) -> np.ndarray:
    span = np.arange(-radius, radius + 1)
    mesh = np.stack(np.meshgrid(*([span] * (n * d)), indexing="ij"), axis=-1).reshape(-1, n * d)
    if exclude_below:
        mesh = mesh[np.abs(mesh).max(axis=1) >= exclude_below]
    return mesh.reshape(-1, n, d)


def _pre_separable_many(x: np.ndarray, ys: np.ndarray, L: int, subsets) -> np.ndarray:
    """Vectorized pre-separability of one cube center x against many centers ys."""
    n = x.shape[0]
    gap = 2 * L
    # |y_i - y_k| and |y_i - x_k| in sup norm
    yy = np.abs(ys[:, :, None, :] - ys[:, None, :, :]).max(axis=-1)
    yx = np.abs(ys[:, :, None, :] - x[None, None, :, :]).max(axis=-1)
    xx = np.abs(x[:, None, :] - x[None, :, :]).max(axis=-1)
    result = np.zeros(ys.shape[0], dtype=bool)
    for J in subsets:
        Jc = [k for k in range(n) if k not in J]
        y_first = (yx[:, J, :] >= gap).all(axis=(1, 2))
        x_first = (yx[:, :, J] >= gap).all(axis=(1, 2))
        if Jc:
            y_first &= (yy[:, J][:, :, Jc] >= gap).all(axis=(1, 2))
            if not (xx[np.ix_(J, Jc)] >= gap).all():
                x_first[:] = False
        result |= y_first | x_first
    return result


def _diagonal_distance_many(points: np.ndarray) -> np.ndarray:
    spread = points.max(axis=1) - points.min(axis=1)
    return ((spread + 1) // 2).max(axis=1)


def separability_audit(n: int, d: int, L: int, r0: int, radius: int, ring: int = 3) -> SeparabilityAudit:
    """
    Exhaustive audit of the sufficient conditions over all centers with |u|, |v| <= radius.

    Checks that each sufficient condition implies the definitional predicate and
    that separable pairs of FI cubes are completely separated. The far-field rule
    is checked for x in Λ_r(0) against every y in the ring 2r <= |y| < 2r + ring.
    """
    audit = SeparabilityAudit()
    centers = _grid(n, d, radius)
    subsets = [list(J) for size in range(1, n + 1) for J in itertools.combinations(range(n), size)]
    r = r_nL(n, L, r0)
    fi_threshold = (n - 1) * (2 * L + r0)
    fi = _diagonal_distance_many(centers) < fi_threshold
    flat = centers.reshape(len(centers), -1)

    for idx, x in enumerate(centers):
        pre = _pre_separable_many(x, centers, L, subsets)
        dist = np.abs(flat - flat[idx]).max(axis=1)
        sep = pre & (dist >= r)
        disjoint = (np.abs(centers[:, :, None, :] - x[None, None, :, :]).max(axis=-1) >= 2 * L).all(axis=(1, 2))
        complete = disjoint & (dist >= r)

        related = np.array(related_points(x), dtype=np.int64).reshape(-1, n * d)
        to_related = np.abs(flat[:, None, :] - related[None, :, :]).max(axis=-1).min(axis=1)
        pre_hit = to_related >= 2 * n * L
        sep_hit = to_related >= r

        audit.pairs += len(centers)
        audit.pre_condition_hits += int(pre_hit.sum())
        audit.pre_condition_contradictions += int((pre_hit & ~pre).sum())
        audit.sep_condition_hits += int(sep_hit.sum())
        audit.sep_condition_contradictions += int((sep_hit & ~sep).sum())
        if fi[idx]:
            both = fi & sep
            audit.separable_fi_pairs += int(both.sum())
            audit.separable_fi_not_complete += int((both & ~complete).sum())

    inner = _grid(n, d, r - 1)
    outer = _grid(n, d, 2 * r + ring - 1, exclude_below=2 * r)
    outer_flat = outer.reshape(len(outer), -1)
    for x in inner:
        pre = _pre_separable_many(x, outer, L, subsets)
        dist = np.abs(outer_flat - x.reshape(-1)).max(axis=1)
        sep = pre & (dist >= r)
        audit.far_field_hits += len(outer)
        audit.far_field_contradictions += int((~sep).sum())

    logger.info(
        f"Separability audit n={n} d={d} L={L} r0={r0} radius={radius}: "
        f"{audit.pairs} pairs, passed={audit.passed}"
    )
    return audit
