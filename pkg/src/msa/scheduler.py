"""
Deterministic bookkeeping of the multi-scale induction.

Scales are exact integers (⌊L^{3/2}⌋ = isqrt(L³)); probability exponents are
exact rationals; masses are carried in 128-bit binary floating point.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from mpmath import mp, mpf

from src.geometry.separability import K, r_nL
from src.models.schedule import InvariantCheck, ScaleSchedule
from src.utils.errors import FeasibilityError, PreconditionError

logger = logging.getLogger("msa.scheduler")

MASS_PRECISION = 128
LIMIT_TERMS = 64


def next_scale(L: int) -> int:
    """⌊L^{3/2}⌋ + 1 in exact integer arithmetic."""
    return math.isqrt(L ** 3) + 1


def scale_sequence(L0: int, K_steps: int) -> List[int]:
    scales = [int(L0)]
    for _ in range(K_steps):
        scales.append(next_scale(scales[-1]))
    return scales


def initial_mass(L0: int) -> mpf:
    """m_{L₀} = L₀^{(β−1)/2}/3 = 1/(3 L₀^{1/4})."""
    with mp.workprec(MASS_PRECISION):
        return 1 / (3 * mp.root(mpf(L0), 4))


def _next_mass(m: mpf, L: int, N: int) -> mpf:
    Lm = mpf(L)
    return m - (96 * N * K(N) / mp.sqrt(Lm) * m + 3 / Lm ** mpf(0.75))


def mass_sequence(scales: List[int], N: int) -> List[mpf]:
    with mp.workprec(MASS_PRECISION):
        masses = [initial_mass(scales[0])]
        for L in scales[:-1]:
            masses.append(_next_mass(masses[-1], L, N))
        return masses


def _as_fraction(value: Union[int, float, str, Fraction]) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def p_sequence(N: int, d: int, p1: Union[int, float, Fraction]) -> List[Fraction]:
    """p_n = p_{n−1}/(α²(1+θ)) − (2n−1)d/(2α) − nd − 1 with θ = 1/(2p₁)."""
    p1 = _as_fraction(p1)
    if p1 <= 0:
        raise PreconditionError(f"p1 must be positive, got {p1}")
    alpha = Fraction(3, 2)
    theta = 1 / (2 * p1)
    ps = [p1]
    for n in range(2, N + 1):
        ps.append(ps[-1] / (alpha ** 2 * (1 + theta)) - Fraction((2 * n - 1) * d) / (2 * alpha) - n * d - 1)
    return ps


def _check_invariants(N: int, d: int, scales: List[int], masses: List[mpf], ps: List[Fraction]) -> List[InvariantCheck]:
    checks = []
    target = 3 * N * d + 1
    checks.append(InvariantCheck("p_N >= 3Nd+1", ps[-1] >= target, N, f"p_N = {float(ps[-1]):.6g}, needs {target}"))
    for k in range(1, len(scales)):
        ok = scales[k] == next_scale(scales[k - 1])
        checks.append(InvariantCheck("L_k = floor(L_{k-1}^alpha) + 1", ok, k))
    with mp.workprec(MASS_PRECISION):
        for k, (L, m) in enumerate(zip(scales, masses)):
            floor = 48 * N * K(N) / mp.sqrt(mpf(L))
            checks.append(InvariantCheck("m_k > 48NK(N)/L_k^(1-beta)", m > floor, k,
                                         f"m = {mp.nstr(m, 8)}, floor = {mp.nstr(floor, 8)}"))
            checks.append(InvariantCheck("m_k > 0", m > 0, k))
        for k in range(1, len(masses)):
            checks.append(InvariantCheck("m strictly decreasing", masses[k] < masses[k - 1], k))
    return checks


def build_schedule(N: int, d: int, p1: Union[int, float, Fraction, str], L0: int, K_steps: int,
                   q_minus: float = 0.0, strict: bool = False) -> ScaleSchedule:
    """
    Scale schedule L₀..L_K with masses and exponents.

    p_N < 3Nd+1 always raises. Mass invariants are reported in `checks` and
    raise only when `strict` is set, since they need very large L₀.
    """
    if N < 1 or d < 1:
        raise PreconditionError(f"Schedule needs N, d >= 1, got N={N}, d={d}")
    if L0 < 2:
        raise PreconditionError(f"Schedule needs L0 >= 2, got {L0}")
    if K_steps < 0:
        raise PreconditionError(f"Schedule needs K >= 0 steps, got {K_steps}")
    if p1 == "auto":
        p1 = min_feasible_p1(N, d)
    ps = p_sequence(N, d, _as_fraction(p1))
    scales = scale_sequence(L0, K_steps)
    masses = mass_sequence(scales, N)
    checks = _check_invariants(N, d, scales, masses, ps)

    schedule = ScaleSchedule(N=N, d=d, p1=ps[0], q_minus=q_minus, L=tuple(scales), m=tuple(masses),
                             p=tuple(ps), checks=tuple(checks))
    for check in schedule.failed():
        logger.warning(f"Schedule invariant '{check.name}' fails at index {check.index}: {check.detail}")
        if check.name.startswith("p_N") or strict:
            raise FeasibilityError(check.name, check.index, check.detail)
    logger.info(f"Built schedule N={N} d={d} p1={float(ps[0]):.6g} L0={L0} K={K_steps}, feasible={schedule.feasible}")
    return schedule


def min_feasible_p1(N: int, d: int) -> int:
    """Smallest integer p₁ whose recursion lands at p_N ≥ 3Nd+1."""
    if N < 1 or d < 1:
        raise PreconditionError(f"min_feasible_p1 needs N, d >= 1, got N={N}, d={d}")
    target = 3 * N * d + 1
    if N == 1:
        return target

    def ok(p1: int) -> bool:
        return p_sequence(N, d, p1)[-1] >= target

    hi = target
    while not ok(hi):
        hi *= 2
    lo = hi // 2 if hi > target else 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if p_sequence(N, d, hi)[-1] < p_sequence(N, d, hi - 1)[-1]:
        raise FeasibilityError("p-recursion monotone in p1", N)
    return hi


@dataclass(frozen=True)
class LimitMass:
    value: float
    initial: float
    tail_bound: float
    terms: int
    largeness_holds: bool
    half_mass_holds: Optional[bool]
    partial_sums: List[float]

    @property
    def positive(self) -> bool:
        return self.value > 0


def largeness_condition(schedule: ScaleSchedule) -> bool:
    """96NK m₀ Σ L₀^{−α^j/2} + 3 Σ L₀^{−3α^j/4} ≤ m₀/2."""
    N = schedule.N
    with mp.workprec(MASS_PRECISION):
        m0 = schedule.m[0]
        log_L0 = mp.log(mpf(schedule.L0))
        eps = mpf(2) ** (-MASS_PRECISION)
        first = second = mpf(0)
        for j in range(LIMIT_TERMS):
            growth = mpf(1.5) ** j
            a, b = mp.exp(-growth / 2 * log_L0), mp.exp(-growth * 3 / 4 * log_L0)
            first += a
            second += b
            if a <= eps:
                break
        return bool(96 * N * K(N) * m0 * first + 3 * second <= m0 / 2)


def limit_mass(schedule: ScaleSchedule) -> LimitMass:
    """
    m = m_{L₀} − Σ_j (m_{L_j} − m_{L_{j+1}}), summed until the remaining
    terms fall below the working precision.
    """
    N = schedule.N
    with mp.workprec(MASS_PRECISION):
        m0 = schedule.m[0]
        m = m0
        L = schedule.L0
        total = mpf(0)
        partial = []
        eps = mpf(2) ** (-MASS_PRECISION)
        term = mpf(0)
        terms = 0
        for terms in range(1, LIMIT_TERMS + 1):
            nxt = _next_mass(m, L, N)
            term = m - nxt
            total += term
            partial.append(float(total))
            m, L = nxt, next_scale(L)
            if abs(term) <= eps * abs(m0):
                break
        # later terms shrink faster than geometrically
        tail = 2 * abs(term)
        value = m0 - total
    largeness = largeness_condition(schedule)
    half = bool(value >= m0 / 2) if largeness else None
    result = LimitMass(float(value), float(m0), float(tail), terms, largeness, half, partial)
    if value <= 0:
        logger.warning(f"Limit mass non-positive for L0={schedule.L0}: {float(value):.6g}")
    if largeness and not half:
        raise FeasibilityError("m >= m_L0/2", None, f"m = {float(value):.6g}")
    return result


def ils_log_margin(L: float, n: int, d: int, beta: float, xi: float, b: float, gamma: float) -> float:
    """log(LHS) − log(RHS) of the initial-scale inequality; ≤ 0 means it holds."""
    lhs = (n * d * math.log(6) - n / 2 * math.log(b) + n * math.log(d)
           + (n * d + n * (beta - 1) / 2) * math.log(L)
           - gamma * 2.0 ** (-d) * math.sqrt(b * L ** (1 - beta)))
    rhs = -xi * math.log(2 * L)
    return lhs - rhs


def ils_constraint_check(L: float, n: int, d: int, beta: float, xi: float, b: float, gamma: float) -> bool:
    """6^{nd} b^{−n/2} dⁿ L^{nd+n(β−1)/2} e^{−γ2^{−d}(bL^{1−β})^{1/2}} ≤ (2L)^{−ξ}."""
    if min(L, n, d, b) <= 0 or beta <= 0 or beta >= 1 or xi < 0 or gamma < 0:
        raise PreconditionError("ILS inequality needs positive parameters and 0 < beta < 1")
    return ils_log_margin(L, n, d, beta, xi, b, gamma) <= 0


def ils_threshold(n: int, d: int, beta: float, xi: float, b: float, gamma: float,
                  L_cap: int = 10 ** 300) -> Optional[int]:
    """
    Smallest integer L beyond which the inequality holds for good.

    The margin is concave in log L, so past its maximum it is decreasing and
    the crossing is found by bisection. None when it never holds below L_cap.
    """
    if gamma <= 0:
        return None
    c = n * d + n * (beta - 1) / 2 + xi
    g = gamma * 2.0 ** (-d) * math.sqrt(b)
    # d/dx of g e^{(1−β)x/2} equals c at the peak
    peak_log = 2 / (1 - beta) * math.log(max(2 * c / (g * (1 - beta)), 1.0))
    peak = math.exp(min(peak_log, 690))
    if ils_log_margin(max(peak, 1.0), n, d, beta, xi, b, gamma) <= 0:
        return 1
    lo = max(1, math.ceil(peak))

    def holds(L: int) -> bool:
        return ils_log_margin(float(L), n, d, beta, xi, b, gamma) <= 0

    if holds(lo):
        return lo
    hi = lo
    while not holds(hi):
        hi *= 2
        if hi > L_cap:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def scheduled_radii(schedule: ScaleSchedule, r0: int) -> List[int]:
    """r_{N,L_k} for every scale of the schedule."""
    return [4 * (schedule.N - 1) * (2 * L + r0) + 2 * L for L in schedule.L]


def radii_consistent(schedule: ScaleSchedule, r0: int) -> bool:
    return all(r == r_nL(schedule.N, L, r0) for r, L in zip(scheduled_radii(schedule, r0), schedule.L))


def ds_target(schedule: ScaleSchedule, n: int, k: int) -> float:
    """L_k^{−2 p_n (1+θ)^k}."""
    exponent = 2 * float(schedule.p[n - 1]) * float(1 + schedule.theta) ** k
    return math.exp(-exponent * math.log(schedule.L[k]))
