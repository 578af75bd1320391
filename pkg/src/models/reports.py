from dataclasses import dataclass, field
from math import log, sqrt
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from src.models.geometry import BoxSpec

WILSON_Z = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


def rule_of_three(trials: int) -> float:
    """One-sided 95% upper bound for zero observed successes."""
    return min(1.0, 3.0 / trials) if trials > 0 else 1.0


class McEstimate(BaseModel):
    """Monte Carlo estimate of an event probability."""
    trials: int = Field(..., ge=0)
    successes: int = Field(..., ge=0)
    p_hat: float = Field(..., ge=0, le=1)
    wilson_95: Tuple[float, float]
    seed: int
    upper_bound: float = Field(..., ge=0, le=1, description="Rule-of-three bound when successes = 0, else Wilson upper end")

    @model_validator(mode="after")
    def _check_interval(self):
        lo, hi = self.wilson_95
        if self.successes > self.trials:
            raise ValueError(f"{self.successes} successes out of {self.trials} trials")
        if not lo <= self.p_hat <= hi:
            raise ValueError(f"Interval {self.wilson_95} does not contain p_hat={self.p_hat}")
        return self

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int) -> "McEstimate":
        p_hat = successes / trials if trials else 0.0
        interval = wilson_interval(successes, trials)
        upper = rule_of_three(trials) if successes == 0 else interval[1]
        return cls(trials=trials, successes=successes, p_hat=p_hat, wilson_95=interval, seed=seed, upper_bound=upper)

    @property
    def zero_successes(self) -> bool:
        return self.successes == 0

    @property
    def neg_log(self) -> float:
        """−log of the point estimate, or of the rule-of-three bound for an empty cell."""
        value = self.upper_bound if self.successes == 0 else self.p_hat
        return -log(value) if value > 0 else float("inf")


@dataclass
class MsaPredicateReport:
    """Flags of the multi-scale predicates for one cube at one energy."""
    cube: BoxSpec
    energy: float
    mass: Optional[float] = None
    ns: Optional[bool] = None
    nr: Optional[bool] = None
    cnr: Optional[bool] = None
    cnr_sampled: bool = False
    nt: Optional[bool] = None
    hnr: Optional[bool] = None
    good: Optional[bool] = None
    J: Optional[int] = None
    resonant: bool = False
    witnesses: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.cnr and self.nr is False:
            raise ValueError("CNR cube reported as resonant")
        if self.resonant and self.ns:
            raise ValueError("Resonant cube reported as non-singular")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cube": self.cube.to_dict(),
            "energy": self.energy,
            "mass": self.mass,
            "ns": self.ns,
            "nr": self.nr,
            "cnr": self.cnr,
            "cnr_sampled": self.cnr_sampled,
            "nt": self.nt,
            "hnr": self.hnr,
            "good": self.good,
            "J": self.J,
            "resonant": self.resonant,
            "witnesses": self.witnesses,
        }
