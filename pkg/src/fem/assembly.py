"""
Multilinear finite elements on the glued cube complex.

Each n-cube carries the tensor product of 1-D piecewise-linear hat functions on
M uniform sub-intervals. Stiffness and mass blocks are exact; the constant W
enters as W_κ times the cube mass block; the interaction U is integrated with
2-point Gauss rules per axis. No essential boundary conditions are imposed, so
vertex and boundary conditions are the natural Kirchhoff/Neumann ones.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.disorder.random_model import eval_U, sample_omega
from src.geometry.lattice import box_edges, glue_nodes
from src.geometry.separability import set_distance
from src.models.disorder import InteractionKernel, InteractionSpec, Mesh, OmegaSample, PotentialLaw
from src.models.geometry import BoxSpec, DofMap
from src.utils.errors import GeometryError, NotDecomposableError

logger = logging.getLogger("fem.assembly")

GAUSS_OFFSET = 0.5 / np.sqrt(3.0)


@dataclass
class AssembledOperator:
    """Generalized eigenproblem (A, B) of a finite-volume operator."""
    A: sp.csr_matrix
    B: sp.csr_matrix
    dofmap: DofMap
    box: BoxSpec
    floor: float
    meta: Dict[str, Any] = field(default_factory=dict)
    cache: Dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.box.n


@lru_cache(maxsize=16)
def reference_1d(M: int):
    """1-D stiffness, mass, Gauss evaluation matrix, weights and points on [0, 1]."""
    h = 1.0 / M
    K1 = np.zeros((M + 1, M + 1))
    M1 = np.zeros((M + 1, M + 1))
    phi = np.zeros((2 * M, M + 1))
    points = np.zeros(2 * M)
    for e in range(M):
        K1[e:e + 2, e:e + 2] += np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        M1[e:e + 2, e:e + 2] += np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6.0
        for g, xi in enumerate((0.5 - GAUSS_OFFSET, 0.5 + GAUSS_OFFSET)):
            q = 2 * e + g
            phi[q, e] = 1.0 - xi
            phi[q, e + 1] = xi
            points[q] = (e + xi) * h
    weights = np.full(2 * M, h / 2.0)
    return K1, M1, phi, weights, points


def _kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@lru_cache(maxsize=16)
def reference_cube(M: int, n: int):
    """Element stiffness, mass, Gauss evaluation matrix, weights and local points of an n-cube."""
    K1, M1, phi1, w1, s1 = reference_1d(M)
    mass = _kron_all([M1] * n)
    stiffness = sum(_kron_all([K1 if k == j else M1 for k in range(n)]) for j in range(n))
    phi = _kron_all([phi1] * n)
    weights = _kron_all([w1] * n)
    grids = np.meshgrid(*([s1] * n), indexing="ij")
    local = np.stack([g.ravel() for g in grids], axis=-1)
    return stiffness, mass, phi, weights, local


class Assembler:
    """Reusable assembly for one (box, interaction, mesh); only W changes between samples."""

    def __init__(self, box: BoxSpec, interaction: Optional[InteractionSpec], mesh: Mesh, decoupled: bool = False):
        self.box = box
        self.interaction = interaction
        self.mesh = mesh
        self.decoupled = decoupled
        self.dofmap = glue_nodes(box, mesh.M, decoupled)
        self.edges = box_edges(box)

        edge_index = {e: i for i, e in enumerate(self.edges)}
        cubes = self.dofmap.cubes
        self.cube_edges = np.array([[edge_index[e] for e in cube.edges] for cube in cubes], dtype=np.int64)

        stiffness, mass, phi, weights, local = reference_cube(mesh.M, box.n)
        self._mass_block = mass
        dofs = self.dofmap.cube_dofs
        nloc = dofs.shape[1]
        self._rows = np.broadcast_to(dofs[:, :, None], (len(cubes), nloc, nloc)).ravel()
        self._cols = np.broadcast_to(dofs[:, None, :], (len(cubes), nloc, nloc)).ravel()
        size = self.dofmap.size

        self.stiffness = self._scatter(np.tile(stiffness.ravel(), len(cubes)), size)
        self.mass = self._symmetric(self._scatter(np.tile(mass.ravel(), len(cubes)), size))
        self.interaction_matrix = self._interaction_blocks(phi, weights, local, size)
        self._base = self.stiffness if self.interaction_matrix is None else self.stiffness + self.interaction_matrix
        logger.debug(f"Assembler ready: {len(cubes)} cubes, {size} DOFs, M={mesh.M}")

    def _scatter(self, data: np.ndarray, size: int) -> sp.csr_matrix:
        return sp.coo_matrix((data, (self._rows, self._cols)), shape=(size, size)).tocsr()

    @staticmethod
    def _symmetric(matrix: sp.csr_matrix) -> sp.csr_matrix:
        return ((matrix + matrix.T) * 0.5).tocsr()

    def _interaction_blocks(self, phi, weights, local, size) -> Optional[sp.csr_matrix]:
        spec = self.interaction
        if spec is None or spec.u0 == 0.0 or self.box.n < 2:
            return None
        d = self.box.d
        bases = np.array([[e.base for e in cube.edges] for cube in self.dofmap.cubes], dtype=float)
        units = np.zeros_like(bases)
        for c, cube in enumerate(self.dofmap.cubes):
            for k, e in enumerate(cube.edges):
                units[c, k, e.dir - 1] = 1.0
        # positions (cubes, quadrature points, n, d)
        positions = bases[:, None, :, :] + local[None, :, :, None] * units[:, None, :, :]
        values = eval_U(positions, spec)
        if not values.any():
            return None
        blocks = np.einsum("qa,cq,qb->cab", phi, values * weights[None, :], phi)
        logger.debug(f"Interaction integrated at {positions.shape[1]} points per cube (d={d})")
        return self._scatter(blocks.ravel(), size)

    def potential_values(self, omega: OmegaSample) -> np.ndarray:
        """W_κ for every cube of the box."""
        return omega.array(self.edges)[self.cube_edges].sum(axis=1)

    def operator(self, omega: OmegaSample) -> AssembledOperator:
        W = self.potential_values(omega)
        nloc = self._mass_block.size
        weighted = (W[:, None] * self._mass_block.ravel()[None, :]).ravel()
        A = self._symmetric(self._base + self._scatter(weighted, self.dofmap.size))
        floor = self.box.n * float(omega.array(self.edges).min())
        meta = {
            "omega_seed": omega.seed,
            "interaction": self.interaction.model_dump(mode="json") if self.interaction else None,
            "M": self.mesh.M,
            "decoupled": self.decoupled,
            "local_size": nloc,
        }
        return AssembledOperator(A=A, B=self.mass, dofmap=self.dofmap, box=self.box, floor=floor, meta=meta)


@lru_cache(maxsize=32)
def _cached_assembler(box: BoxSpec, u0: float, r0: int, kernel: str, M: int, decoupled: bool) -> Assembler:
    interaction = InteractionSpec(u0=u0, r0=r0, kernel=InteractionKernel(kernel))
    return Assembler(box, interaction, Mesh(M=M), decoupled)


def assembler_for(box: BoxSpec, interaction: Optional[InteractionSpec], mesh: Mesh, decoupled: bool = False) -> Assembler:
    spec = interaction or InteractionSpec(u0=0.0)
    return _cached_assembler(box, spec.u0, spec.r0, spec.kernel.value, mesh.M, decoupled)


def assemble(box: BoxSpec, omega: OmegaSample, interaction: Optional[InteractionSpec], mesh: Mesh,
             decoupled: bool = False) -> AssembledOperator:
    """Finite-volume operator on `box` for one disorder sample."""
    return assembler_for(box, interaction, mesh, decoupled).operator(omega)


def check_decomposable(box: BoxSpec, J: Sequence[int], r0: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Validate that the cube box splits along J; returns (J, J^c)."""
    J = tuple(sorted(set(J)))
    Jc = tuple(i for i in range(box.n) if i not in J)
    if not J or not Jc or any(not 0 <= j < box.n for j in J):
        raise GeometryError(f"Partition {J} is not a proper subset of {box.n} particles")
    gap = set_distance([box.center[i] for i in J], [box.center[i] for i in Jc])
    if gap < 2 * box.L + r0:
        raise NotDecomposableError(f"dist(u_J, u_Jc) = {gap} < 2L + r0 = {2 * box.L + r0}")
    return J, Jc


def assemble_decomposed(box: BoxSpec, J: Sequence[int], omega: OmegaSample,
                        interaction: Optional[InteractionSpec], mesh: Mesh) -> Tuple[AssembledOperator, AssembledOperator]:
    """Factor operators on Λ(u_J) and Λ(u_{J^c}) of a decomposable cube."""
    r0 = interaction.r0 if interaction else 1
    J, Jc = check_decomposable(box, J, r0)
    return (
        assemble(box.factor(J), omega, interaction, mesh),
        assemble(box.factor(Jc), omega, interaction, mesh),
    )


def tensor_permutation(full: DofMap, first: DofMap, second: DofMap, J: Sequence[int]) -> np.ndarray:
    """Index of each full DOF in the Kronecker ordering first ⊗ second."""
    J = tuple(J)
    Jc = tuple(i for i in range(full.box.n) if i not in J)
    size2 = second.size
    perm = np.empty(full.size, dtype=np.int64)
    for i, node in enumerate(full.nodes):
        a = first.index[tuple(node[j] for j in J)]
        b = second.index[tuple(node[j] for j in Jc)]
        perm[i] = a * size2 + b
    return perm


def kronecker_sum(full: DofMap, first: AssembledOperator, second: AssembledOperator,
                  J: Sequence[int]) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """A'⊗B'' + B'⊗A'' and B'⊗B'' in the DOF order of the full box."""
    A = sp.kron(first.A, second.B) + sp.kron(first.B, second.A)
    B = sp.kron(first.B, second.B)
    perm = tensor_permutation(full, first.dofmap, second.dofmap, J)
    A = A.tocsr()[perm][:, perm]
    B = B.tocsr()[perm][:, perm]
    return A.tocsr(), B.tocsr()


def to_triplets(matrix: sp.spmatrix) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    return coo.row[order], coo.col[order], coo.data[order]


@dataclass(frozen=True)
class OperatorFactory:
    """Operators on arbitrary boxes for one disorder realization (edge values hashed from `seed`)."""
    law: PotentialLaw
    interaction: Optional[InteractionSpec]
    mesh: Mesh
    seed: int

    def omega(self, box: BoxSpec) -> OmegaSample:
        return sample_omega(self.law, box_edges(box), self.seed)

    def __call__(self, box: BoxSpec, decoupled: bool = False) -> AssembledOperator:
        return assemble(box, self.omega(box), self.interaction, self.mesh, decoupled)

    def with_seed(self, seed: int) -> "OperatorFactory":
        return OperatorFactory(self.law, self.interaction, self.mesh, int(seed))
