from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.special import beta as beta_function

from src.models.geometry import EdgeId
from src.utils.errors import MeshTooCoarseError, MissingEdgeError


class PotentialKind(str, Enum):
    UNIFORM = "uniform"
    BETA_SMOOTHED = "beta_smoothed"
    POINT_MASS = "point_mass"


class InteractionKernel(str, Enum):
    HARD_INDICATOR = "hard_indicator"
    TRIANGULAR_BUMP = "triangular_bump"


class PotentialLaw(BaseModel):
    """Single-site law μ on [q_minus, q_plus]."""
    kind: PotentialKind = Field(default=PotentialKind.UNIFORM)
    q_minus: float = Field(default=0.0)
    q_plus: float = Field(default=1.0)
    shape: float = Field(default=2.0, gt=0, description="Beta(a, a) shape parameter for beta_smoothed")

    @model_validator(mode="after")
    def _check_support(self):
        if self.kind == PotentialKind.POINT_MASS:
            self.q_plus = self.q_minus
        elif not self.q_minus < self.q_plus:
            raise ValueError(f"Support needs q_minus < q_plus, got [{self.q_minus}, {self.q_plus}]")
        return self

    @property
    def width(self) -> float:
        return self.q_plus - self.q_minus

    @property
    def is_holder_continuous(self) -> bool:
        return self.kind != PotentialKind.POINT_MASS

    @property
    def holder_exponent(self) -> float:
        if self.kind == PotentialKind.BETA_SMOOTHED:
            return min(self.shape, 1.0)
        return 1.0

    @property
    def holder_constant(self) -> float:
        """c_μ with s(μ, ε) <= c_μ ε^b; infinite for a point mass."""
        if self.kind == PotentialKind.POINT_MASS:
            return float("inf")
        if self.kind == PotentialKind.UNIFORM:
            return 1.0 / self.width
        a = self.shape
        if a >= 1.0:
            peak = 1.0 / (beta_function(a, a) * 4.0 ** (a - 1.0))
            return float(peak / self.width)
        edge = 2.0 ** (1.0 - a) / (a * beta_function(a, a))
        return float(max(edge, 2.0 ** a) / self.width ** a)


class InteractionSpec(BaseModel):
    """Two-body interaction U(x) = Σ_{i<j} F(x_i - x_j) with sup-norm range r0."""
    u0: float = Field(default=1.0, ge=0, description="Pair amplitude")
    r0: int = Field(default=1, ge=1)
    kernel: InteractionKernel = Field(default=InteractionKernel.HARD_INDICATOR)

    def bound(self, n: int) -> float:
        """Upper bound of U for n particles."""
        return comb(n, 2) * self.u0


class Mesh(BaseModel):
    """Uniform subdivision of each unit edge into M pieces."""
    M: int = Field(default=4)

    @field_validator("M")
    @classmethod
    def _check_m(cls, value: int) -> int:
        if value < 2:
            raise MeshTooCoarseError(f"Mesh needs M >= 2 subdivisions, got {value}")
        return value

    @property
    def h(self) -> float:
        return 1.0 / self.M


@dataclass
class OmegaSample:
    """One disorder realization: edge -> potential value."""
    values: Dict[EdgeId, float]
    seed: Optional[int] = None
    law: Optional[PotentialLaw] = field(default=None, repr=False)

    def __getitem__(self, edge: EdgeId) -> float:
        try:
            return self.values[edge]
        except KeyError:
            raise MissingEdgeError(f"No potential value for edge {edge.address()}")

    def __len__(self) -> int:
        return len(self.values)

    def covers(self, edges: Iterable[EdgeId]) -> bool:
        return all(e in self.values for e in edges)

    def restrict(self, edges: Iterable[EdgeId]) -> "OmegaSample":
        return OmegaSample({e: self[e] for e in edges}, seed=self.seed, law=self.law)

    def array(self, edges: List[EdgeId]) -> np.ndarray:
        return np.array([self[e] for e in edges], dtype=float)
