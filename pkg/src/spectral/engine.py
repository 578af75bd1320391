"""
Spectral engine for assembled operators (A, B).

Dense LAPACK solvers below `settings.dense_threshold` DOFs; shift-invert
Lanczos (ARPACK) and sparse LU above it. Eigenvectors are B-orthonormal and
all norms are taken in the B-weighted inner product.
"""

import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, splu
from scipy.sparse.linalg import norm as sparse_norm
from scipy.special import gamma

from src.config.settings import settings
from src.fem.assembly import AssembledOperator
from src.models.spectral import GreenBlock, SemigroupPairing, SpectralResult
from src.utils.errors import (
    AccuracyError, GeometryError, InconclusiveError, PreconditionError, ResonanceError, SolverFailureError,
)
from src.utils.seeding import generator

logger = logging.getLogger("spectral.engine")


def _scale(op: AssembledOperator) -> Tuple[float, float]:
    if "norms" not in op.cache:
        op.cache["norms"] = (float(sparse_norm(op.A, 1)), float(sparse_norm(op.B, 1)))
    return op.cache["norms"]


def _residuals(op: AssembledOperator, vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    R = op.A @ vecs - (op.B @ vecs) * vals[None, :]
    return np.linalg.norm(R, axis=0) / np.linalg.norm(vecs, axis=0)


def _validate(op: AssembledOperator, result: SpectralResult, tol: float) -> SpectralResult:
    normA, normB = _scale(op)
    allowed = tol * (normA + np.abs(result.eigenvalues) * normB)
    if np.any(result.residual_norms > allowed):
        worst = float(np.max(result.residual_norms / allowed * tol))
        logger.error(f"Eigenpairs failed residual check on {op.size} DOFs: {worst:.3e}")
        raise SolverFailureError("Eigenpair residual above tolerance", best_residual=worst)
    return result


def full_spectrum(op: AssembledOperator) -> SpectralResult:
    """All generalized eigenpairs by dense solve (the oracle path)."""
    if "full" not in op.cache:
        vals, vecs = la.eigh(op.A.toarray(), op.B.toarray())
        result = SpectralResult(vals, vecs, _residuals(op, vals, vecs), complete=True, dense=True)
        op.cache["full"] = _validate(op, result, settings.eig_tol)
    return op.cache["full"]


def lowest_eigs(op: AssembledOperator, k: int, tol: Optional[float] = None) -> SpectralResult:
    """The k smallest generalized eigenpairs."""
    N = op.size
    if not 1 <= k <= N:
        raise PreconditionError(f"Requested {k} eigenpairs from an operator with {N} DOFs")
    tol = settings.eig_tol if tol is None else tol

    if "full" in op.cache:
        return op.cache["full"].head(k)
    cached = op.cache.get("lowest")
    if cached is not None and cached.k >= k:
        return cached.head(k)

    if N <= settings.dense_threshold or k >= N - 1:
        full = full_spectrum(op)
        return full.head(k)

    sigma = op.floor - 1.0
    v0 = generator(settings.solver_seed).standard_normal(N)
    try:
        vals, vecs = eigsh(op.A.tocsc(), k=k, M=op.B.tocsc(), sigma=sigma, which="LM", v0=v0,
                           tol=0.0, maxiter=settings.max_eig_iterations)
    except ArpackNoConvergence as exc:
        best = None
        if len(exc.eigenvalues):
            best = float(np.max(_residuals(op, exc.eigenvalues, exc.eigenvectors)))
        logger.error(f"Shift-invert Lanczos did not converge for k={k} on {N} DOFs")
        raise SolverFailureError("Shift-invert Lanczos did not converge", best_residual=best)

    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    vecs = vecs / np.sqrt(np.einsum("ij,ij->j", vecs, op.B @ vecs))[None, :]
    result = _validate(op, SpectralResult(vals, vecs, _residuals(op, vals, vecs)), tol)
    op.cache["lowest"] = result
    logger.debug(f"Lowest {k} eigenpairs on {N} DOFs: E_1={vals[0]:.6g}, E_k={vals[-1]:.6g}")
    return result


def eigs_up_to(op: AssembledOperator, ceiling: float, k_start: int = 8, k_max: Optional[int] = None) -> SpectralResult:
    """Every eigenpair with E_j <= ceiling, plus one above it unless the spectrum is complete."""
    N = op.size
    k = min(k_start, N)
    while True:
        result = lowest_eigs(op, k)
        if result.complete or k == N or result.eigenvalues[-1] > ceiling:
            return result
        if k_max is not None and k >= k_max:
            raise InconclusiveError(f"More than {k_max} eigenvalues below {ceiling}")
        k = min(2 * k, N)


def count_below(op: AssembledOperator, S: float) -> int:
    """#{j : E_j <= S}."""
    return int(np.sum(eigs_up_to(op, S).eigenvalues <= S))


def weyl_constant(n: int, d: int, S: float, q_minus: float) -> int:
    """⌊dⁿ (S - n q₋)^{n/2} / ((4π)^{n/2} Γ(n/2))⌋ + 1."""
    excess = max(S - n * q_minus, 0.0)
    return int(math.floor(d ** n * excess ** (n / 2) / ((4 * math.pi) ** (n / 2) * gamma(n / 2)))) + 1


def dist_to_spectrum(op: AssembledOperator, E: float, k_max: Optional[int] = None) -> float:
    """
    min_j |E_j - E| with a ceiling certificate.

    The eigenvalue block is grown until its largest member E_+ satisfies
    E_+ - E > distance, so no uncomputed eigenvalue can be closer.
    """
    N = op.size
    k = min(8, N)
    while True:
        result = lowest_eigs(op, k)
        vals = result.eigenvalues
        distance = float(np.min(np.abs(vals - E)))
        if result.complete or k == N or vals[-1] - E > distance:
            return distance
        if k_max is not None and k >= k_max:
            raise InconclusiveError(f"Ceiling E+={vals[-1]:.6g} too low to certify distance at E={E}")
        k = min(2 * k, N)


class GreenFunction:
    """
    Resolvent (A - E B)^{-1} at a fixed energy.

    Immutable after construction; block-norm queries may run concurrently.
    """

    def __init__(self, op: AssembledOperator, E: float):
        self.op = op
        self.E = float(E)
        self.distance = dist_to_spectrum(op, E)
        if self.distance <= settings.solve_tol * max(1.0, abs(E)):
            logger.warning(f"Resonant energy E={E} (distance {self.distance:.3e})")
            raise ResonanceError(f"E={E} lies on the spectrum", distance=self.distance)
        self.shifted = (op.A - self.E * op.B).tocsc()
        self._shift_norm = float(sparse_norm(self.shifted, 1))
        self._cells: Dict[Tuple[int, ...], Tuple[np.ndarray, np.ndarray]] = {}
        if op.size <= settings.dense_threshold:
            full = full_spectrum(op)
            self._vectors = full.eigenvectors
            self._inverse_shift = 1.0 / (full.eigenvalues - self.E)
            self._lu = None
        else:
            try:
                self._lu = splu(self.shifted)
            except RuntimeError as exc:
                raise ResonanceError(f"Singular shift at E={E}: {exc}", distance=self.distance)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._lu is None:
            sol = self._vectors @ (self._inverse_shift[:, None] * (self._vectors.T @ rhs))
        else:
            sol = self._lu.solve(rhs)
        residual = np.linalg.norm(self.shifted @ sol - rhs)
        scale = self._shift_norm * np.linalg.norm(sol) + np.linalg.norm(rhs)
        if residual > 1e-10 * scale:
            raise SolverFailureError("Resolvent identity check failed", best_residual=float(residual / scale))
        return sol

    def cell(self, x: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """DOFs of the cell around x and the Cholesky factor of their mass block."""
        key = tuple(int(c) for c in x)
        if key not in self._cells:
            dofs = self.op.dofmap.cell_dofs(key)
            if dofs.size == 0:
                raise GeometryError(f"Cell {key} holds no DOFs of this box")
            block = self.op.B[dofs][:, dofs].toarray()
            self._cells[key] = (dofs, la.cholesky(block, lower=False))
        return self._cells[key]

    def sweep(self, source: Sequence[int], targets: Iterable[Sequence[int]]) -> np.ndarray:
        """Block norms ‖χ_x G χ_source‖ for every target x, from one multi-RHS solve."""
        dofs_y, R_y = self.cell(source)
        rhs = self.op.B[:, dofs_y].toarray()
        BZ = self.op.B @ self.solve(rhs)
        norms = []
        for x in targets:
            dofs_x, R_x = self.cell(x)
            left = la.solve_triangular(R_x, BZ[dofs_x], trans="T", lower=False)
            core = la.solve_triangular(R_y, left.T, trans="T", lower=False).T
            norms.append(float(la.norm(core, 2)))
        return np.array(norms)

    def block_norm(self, x: Sequence[int], y: Sequence[int]) -> GreenBlock:
        norm = float(self.sweep(y, [x])[0])
        return GreenBlock(source=tuple(y), target=tuple(x), energy=self.E, norm=norm)


def green_block_norm(op: AssembledOperator, E: float, x: Sequence[int], y: Sequence[int]) -> GreenBlock:
    """‖χ_x (H - E)^{-1} χ_y‖ for lattice points x, y in R^{nd}."""
    return GreenFunction(op, E).block_norm(x, y)


def b_norm(op: AssembledOperator, v: np.ndarray) -> float:
    return float(np.sqrt(v @ (op.B @ v)))


def _mass_lu(op: AssembledOperator):
    if "mass_lu" not in op.cache:
        op.cache["mass_lu"] = splu(op.B.tocsc())
    return op.cache["mass_lu"]


def semigroup_pair(op: AssembledOperator, f: np.ndarray, g: np.ndarray, t: float,
                   atol: Optional[float] = None, dense: Optional[bool] = None) -> SemigroupPairing:
    """
    <e^{-tH} f, g> in the B inner product.

    Dense spectral calculus below the dense threshold; otherwise Lanczos in the
    B inner product with full reorthogonalization, stopped by the standard
    a-posteriori estimate β_m |e_mᵀ exp(-tT_m) e_1|.
    """
    if t <= 0:
        raise PreconditionError(f"Semigroup time must be positive, got {t}")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    nf, ng = b_norm(op, f), b_norm(op, g)
    if nf == 0.0 or ng == 0.0:
        return SemigroupPairing(0.0, 0.0, "trivial")
    atol = 1e-13 * nf * ng if atol is None else atol
    use_dense = op.size <= settings.dense_threshold if dense is None else dense

    if use_dense:
        full = full_spectrum(op)
        V = full.eigenvectors
        cf, cg = V.T @ (op.B @ f), V.T @ (op.B @ g)
        value = float(np.sum(np.exp(-t * (full.eigenvalues - full.eigenvalues[0])) * cf * cg)
                      * np.exp(-t * full.eigenvalues[0]))
        defect = float(np.abs(V.T @ (op.B @ V) - np.eye(V.shape[1])).max())
        error = (defect + 10 * op.size * np.finfo(float).eps) * nf * ng
        return SemigroupPairing(value, error, "dense")

    lu = _mass_lu(op)
    Bg = op.B @ g
    basis: List[np.ndarray] = [f / nf]
    alphas: List[float] = []
    betas: List[float] = []
    error = float("inf")
    value = 0.0
    for j in range(settings.krylov_max_dim):
        q = basis[-1]
        w = lu.solve(op.A @ q)
        alpha = float(q @ (op.B @ w))
        w = w - alpha * q - (betas[-1] * basis[-2] if betas else 0.0)
        Q = np.array(basis).T
        for _ in range(2):
            w = w - Q @ (Q.T @ (op.B @ w))
        beta = b_norm(op, w)
        alphas.append(alpha)
        theta, S = la.eigh_tridiagonal(np.array(alphas), np.array(betas)) if betas else (np.array(alphas), np.ones((1, 1)))
        shift = theta.min()
        coeffs = S @ (np.exp(-t * (theta - shift)) * S[0, :]) * np.exp(-t * shift)
        value = float(nf * (Bg @ (Q @ coeffs)))
        error = float(nf * ng * beta * abs(coeffs[-1]))
        if error <= atol or beta <= 1e-14 * nf:
            return SemigroupPairing(value, error, "lanczos", krylov_dim=j + 1)
        betas.append(beta)
        basis.append(w / beta)
    logger.warning(f"Lanczos semigroup stalled at dimension {settings.krylov_max_dim}, error {error:.3e}")
    raise AccuracyError(f"Semigroup accuracy {atol:.3e} unreachable (estimate {error:.3e})")


def spectral_projector_apply(op: AssembledOperator, interval: Tuple[float, float], v: np.ndarray) -> np.ndarray:
    """Σ_{E_j ∈ I} <v, v_j>_B v_j."""
    lo, hi = interval
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise PreconditionError(f"Projector needs a bounded interval, got {interval}")
    result = eigs_up_to(op, hi)
    mask = (result.eigenvalues >= lo) & (result.eigenvalues <= hi)
    V = result.eigenvectors[:, mask]
    return V @ (V.T @ (op.B @ v))


def _cells_dofs(op: AssembledOperator, cells: Iterable[Sequence[int]]) -> np.ndarray:
    dofs = set()
    for x in cells:
        dofs.update(op.dofmap.cell_dofs(x).tolist())
    if not dofs:
        raise GeometryError("Cellular set holds no DOFs of this box")
    return np.array(sorted(dofs), dtype=np.int64)


def dyn_moment(op: AssembledOperator, interval: Tuple[float, float], cells: Iterable[Sequence[int]],
               s: float, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """‖X^{s/2} f(H) E(I) χ_K‖²_HS from the eigenpair block inside I."""
    if s < 0:
        raise PreconditionError(f"Moment order must be non-negative, got {s}")
    lo, hi = interval
    result = eigs_up_to(op, hi)
    mask = (result.eigenvalues >= lo) & (result.eigenvalues <= hi)
    if not mask.any():
        return 0.0
    V = result.eigenvectors[:, mask]
    fvals = np.asarray(f(result.eigenvalues[mask]), dtype=float)
    weights = np.abs(op.dofmap.positions).max(axis=1) ** (s / 2.0)
    XV = weights[:, None] * V
    G1 = XV.T @ (op.B @ XV)
    dofs = _cells_dofs(op, cells)
    BV = (op.B @ V)[dofs]
    G2 = BV.T @ la.cho_solve(la.cho_factor(op.B[dofs][:, dofs].toarray()), BV)
    F = np.diag(fvals)
    return float(np.sum((F @ G1 @ F) * G2.T))
