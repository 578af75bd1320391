from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from mpmath import mp, mpf


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool
    index: Optional[int] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "index": self.index, "detail": self.detail}


@dataclass(frozen=True)
class ScaleSchedule:
    """Scales, masses and probability exponents of a multi-scale induction."""
    N: int
    d: int
    p1: Fraction
    q_minus: float
    L: Tuple[int, ...]
    m: Tuple[mpf, ...]
    p: Tuple[Fraction, ...]
    checks: Tuple[InvariantCheck, ...] = field(default=())
    alpha: Fraction = Fraction(3, 2)
    beta: Fraction = Fraction(1, 2)
    J: int = 6

    @property
    def theta(self) -> Fraction:
        return 1 / (2 * self.p1)

    @property
    def L0(self) -> int:
        return self.L[0]

    @property
    def K(self) -> int:
        return len(self.L) - 1

    @property
    def E_plus(self) -> float:
        return max(n * self.q_minus + 1 for n in range(1, self.N + 1))

    @property
    def eps0(self) -> float:
        return float(self.L0) ** (float(self.beta) - 1) / 2

    def interval(self, n: int) -> Tuple[float, float]:
        """I_n = [n q₋ − 1/2, n q₋ + ε₀]."""
        return n * self.q_minus - 0.5, n * self.q_minus + self.eps0

    @property
    def feasible(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def masses(self) -> List[float]:
        return [float(m) for m in self.m]

    def failed(self) -> List[InvariantCheck]:
        return [check for check in self.checks if not check.passed]

    def to_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for k, (L, m) in enumerate(zip(self.L, self.m)):
            rows.append({
                "k": k,
                "L": L,
                "m": mp.nstr(m, 17),
                "mass_floor": float(48 * self.N * self.N ** self.N / mpf(L).sqrt()),
                "exponent_p1": float(2 * self.p1 * (1 + self.theta) ** k),
            })
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "d": self.d,
            "p1": str(self.p1),
            "theta": str(self.theta),
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "J": self.J,
            "q_minus": self.q_minus,
            "E_plus": self.E_plus,
            "eps0": self.eps0,
            "intervals": {n: list(self.interval(n)) for n in range(1, self.N + 1)},
            "L": list(self.L),
            "m": [mp.nstr(m, 17) for m in self.m],
            "p": [float(p) for p in self.p],
            "checks": [check.to_dict() for check in self.checks],
            "l_star_verified": False,
        }
