from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


@dataclass
class SpectralResult:
    """Lowest generalized eigenpairs in ascending order."""
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    residual_norms: np.ndarray
    complete: bool = False
    dense: bool = False

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def head(self, k: int) -> "SpectralResult":
        vecs = None if self.eigenvectors is None else self.eigenvectors[:, :k]
        return SpectralResult(self.eigenvalues[:k], vecs, self.residual_norms[:k],
                              complete=self.complete and k >= len(self.eigenvalues), dense=self.dense)


@dataclass(frozen=True)
class GreenBlock:
    """Norm of χ_target (H - E)^{-1} χ_source in the B-weighted sense."""
    source: Tuple[int, ...]
    target: Tuple[int, ...]
    energy: float
    norm: float


@dataclass(frozen=True)
class SemigroupPairing:
    """<e^{-tH} f, g> with an estimate of its absolute error."""
    value: float
    error_bound: float
    method: str
    krylov_dim: int = 0
