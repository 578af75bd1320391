"""
Monte Carlo estimators over the disorder.

Trial i uses the seed mix(base, i); counts are aggregated in trial order, so an
estimate depends only on (base seed, trials) and not on the worker count.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.diagnostics.msa_predicates import classify_NS
from src.disorder.random_model import concentration
from src.fem.assembly import OperatorFactory
from src.geometry.lattice import count_edges, full_projection
from src.geometry.separability import separability, separated_pair
from src.models.geometry import BoxSpec
from src.models.reports import McEstimate
from src.models.schedule import ScaleSchedule
from src.msa.scheduler import ds_target
from src.spectral.engine import dist_to_spectrum, eigs_up_to, lowest_eigs
from src.utils.errors import PreconditionError
from src.utils.parallel import TrialPool
from src.utils.seeding import mix

logger = logging.getLogger("diagnostic.monte_carlo")

ORACLE_STREAM = 0x6F7261
MAX_GRID_POINTS = 1_000_000


def energy_grid(lo: float, hi: float, L: float, beta: float, min_points: int = 2) -> Tuple[float, ...]:
    """Uniform energies over [lo, hi] with spacing at most e^{−L^β}/4."""
    exponent = float(L) ** beta
    if hi > lo and math.log(4 * (hi - lo)) + exponent > math.log(MAX_GRID_POINTS):
        raise PreconditionError(f"Energy grid at L={L} exceeds {MAX_GRID_POINTS} points")
    points = max(min_points, int(math.ceil((hi - lo) * 4 * math.exp(exponent))) + 1)
    return tuple(float(E) for E in np.linspace(lo, hi, points))


def projection_volume(box: BoxSpec) -> int:
    """|Π Λ|: exact for d = 1, the sum of the distinct 1-particle boxes otherwise."""
    union = full_projection(box)
    if box.d == 1:
        return sum(hi - lo for lo, hi in union.merged_intervals())
    return sum((2 * L) ** box.d for _, L in union.boxes)


@dataclass
class WegnerReport:
    estimate: McEstimate
    eps: float
    concentration: float
    volume_factor: float
    ratio: float
    oracle: Optional[McEstimate] = None
    rows: List[Dict[str, Any]] = field(default_factory=list)


def _spectral_distance_trial(factory: OperatorFactory, box: BoxSpec, E: float, base: int, index: int) -> float:
    op = factory.with_seed(mix(base, index))(box)
    return dist_to_spectrum(op, E)


def mc_wegner_one(factory: OperatorFactory, box: BoxSpec, E: float, eps: float, trials: int, seed: int,
                  workers: Optional[int] = None, particle: int = 0) -> WegnerReport:
    """ℙ{dist(σ(H_Λ), E) < ε} against |Λ|·|Π_iΛ|·s(μ, 2ε)."""
    if eps <= 0:
        raise PreconditionError(f"Wegner estimate needs eps > 0, got {eps}")
    distances = TrialPool(workers).map(partial(_spectral_distance_trial, factory, box, E, seed), range(trials))
    hits = [d < eps for d in distances]
    estimate = McEstimate.from_counts(sum(hits), trials, seed)
    s = concentration(factory.law, 2 * eps)
    volume = box.volume() * (2 * box.sides[particle]) ** box.d
    ratio = estimate.p_hat / (volume * s) if s > 0 else float("inf")
    rows = [{"trial": i, "distance": d, "hit": h} for i, (d, h) in enumerate(zip(distances, hits))]
    logger.info(f"Wegner one-volume E={E} eps={eps}: {estimate.successes}/{trials}")
    return WegnerReport(estimate, eps, s, float(volume), ratio, rows=rows)


def wegner_slope(reports: Sequence[WegnerReport]) -> float:
    """Log-log slope of p̂ against ε."""
    eps = np.log([r.eps for r in reports])
    p = np.log([max(r.estimate.p_hat, 1e-300) for r in reports])
    return float(np.polyfit(eps, p, 1)[0])


def _interval_spectrum(factory: OperatorFactory, box: BoxSpec, interval: Tuple[float, float], seed: int) -> np.ndarray:
    vals = eigs_up_to(factory.with_seed(seed)(box), interval[1]).eigenvalues
    return vals[(vals >= interval[0]) & (vals <= interval[1])]


def _pair_distance(first: np.ndarray, second: np.ndarray) -> float:
    if first.size == 0 or second.size == 0:
        return float("inf")
    return float(np.min(np.abs(first[:, None] - second[None, :])))


def _two_volume_trial(factory: OperatorFactory, first: BoxSpec, second: BoxSpec, interval: Tuple[float, float],
                      base: int, index: int) -> Tuple[float, float]:
    seed = mix(base, index)
    a = _interval_spectrum(factory, first, interval, seed)
    b = _interval_spectrum(factory, second, interval, seed)
    # second box from an independent stream
    b_indep = _interval_spectrum(factory, second, interval, mix(base ^ ORACLE_STREAM, index))
    return _pair_distance(a, b), _pair_distance(a, b_indep)


def mc_wegner_two(factory: OperatorFactory, first: BoxSpec, second: BoxSpec, interval: Tuple[float, float],
                  eps: float, trials: int, seed: int, workers: Optional[int] = None) -> WegnerReport:
    """
    ℙ{dist(σ_I(H_1), σ_I(H_2)) < ε} for pre-separable boxes.

    The oracle estimate pairs the first box with an independent copy of the
    second; both agree when the boxes see disjoint edges.
    """
    if first.n != second.n or not first.is_cube or not second.is_cube:
        raise PreconditionError("Two-volume estimate compares cubes with the same particle number")
    sep = separability(first.center, second.center, first.L, 1)
    if first.L != second.L or not sep.pre_separable:
        raise PreconditionError(f"Boxes at {first.center} and {second.center} are not pre-separable")
    if eps <= 0:
        raise PreconditionError(f"Wegner estimate needs eps > 0, got {eps}")
    fn = partial(_two_volume_trial, factory, first, second, tuple(interval), seed)
    results = TrialPool(workers).map(fn, range(trials))
    hits = sum(1 for joint, _ in results if joint < eps)
    oracle_hits = sum(1 for _, indep in results if indep < eps)
    estimate = McEstimate.from_counts(hits, trials, seed)
    oracle = McEstimate.from_counts(oracle_hits, trials, seed)
    s = concentration(factory.law, 2 * eps)
    volume = first.volume() * second.volume() * projection_volume(first)
    ratio = estimate.p_hat / (volume * s) if s > 0 else float("inf")
    rows = [{"trial": i, "distance": j, "independent_distance": k} for i, (j, k) in enumerate(results)]
    return WegnerReport(estimate, eps, s, float(volume), ratio, oracle=oracle, rows=rows)


@dataclass
class LifshitzReport:
    b: float
    n: int
    d: int
    n_l: List[int]
    estimates: List[McEstimate]
    gamma_hat: Optional[float]
    trend_holds: bool


def lifshitz_threshold(n: int, q_minus: float, b: float, n_l: int) -> float:
    """n q₋ + n b n_l⁻²."""
    return n * q_minus + n * b / n_l ** 2


def _ground_energy_trial(factory: OperatorFactory, box: BoxSpec, base: int, index: int) -> float:
    return lowest_eigs(factory.with_seed(mix(base, index))(box), 1).ground_energy


def lifshitz_trend(estimates: Sequence[McEstimate]) -> bool:
    """
    −log p̂ strictly increasing along the grid.

    A cell without successes uses its rule-of-three bound, which must exceed the
    last nonzero cell's −log p̂; a nonzero cell after an empty one breaks the trend.
    """
    last = -math.inf
    seen_empty = False
    for est in estimates:
        if est.zero_successes:
            if est.neg_log <= last:
                return False
            seen_empty = True
        else:
            if seen_empty or est.neg_log <= last:
                return False
            last = est.neg_log
    return True


def mc_lifshitz(factory: OperatorFactory, l_grid: Sequence[int], b: float, trials: int, seed: int,
                n: int = 1, d: int = 1, workers: Optional[int] = None) -> LifshitzReport:
    """Per-l estimates of ℙ{E₁(H_{Λ_l}) ≤ n q₋ + n b n_l⁻²} and a fitted γ̂."""
    if b < 0:
        raise PreconditionError(f"Lifshitz threshold needs b >= 0, got {b}")
    q_minus = factory.law.q_minus
    pool = TrialPool(workers)
    n_ls, estimates = [], []
    for l in l_grid:
        box = BoxSpec.cube(tuple((0,) * d for _ in range(n)), l)
        n_l = count_edges(d, l)
        threshold = lifshitz_threshold(n, q_minus, b, n_l)
        energies = pool.map(partial(_ground_energy_trial, factory, box, seed), range(trials))
        est = McEstimate.from_counts(sum(1 for e in energies if e <= threshold), trials, seed)
        n_ls.append(n_l)
        estimates.append(est)
        logger.info(f"Lifshitz l={l} n_l={n_l}: {est.successes}/{trials}")
    nonzero = [(x, est.neg_log) for x, est in zip(n_ls, estimates) if not est.zero_successes]
    gamma_hat = float(np.polyfit(*zip(*nonzero), 1)[0]) if len(nonzero) >= 2 else None
    return LifshitzReport(b, n, d, n_ls, estimates, gamma_hat, lifshitz_trend(estimates))


@dataclass
class IlsReport:
    L0: int
    beta: float
    mass: float
    eps0: float
    gap: McEstimate
    ns_scan: Optional[McEstimate] = None
    grid_points: int = 0


def ils_mass(L0: int, beta: float = 0.5) -> float:
    """m_{L₀} = L₀^{(β−1)/2}/3."""
    return L0 ** ((beta - 1) / 2) / 3


def _ils_trial(factory: OperatorFactory, box: BoxSpec, threshold: float, grid: Sequence[float], mass: float,
               base: int, index: int) -> Tuple[bool, bool]:
    op = factory.with_seed(mix(base, index))(box)
    gap_event = lowest_eigs(op, 1).ground_energy - box.n * factory.law.q_minus <= threshold
    singular = any(not classify_NS(op, box, E, mass).ns for E in grid) if grid else False
    return gap_event, singular


def mc_ils(factory: OperatorFactory, box: BoxSpec, trials: int, seed: int, beta: float = 0.5,
           ns_scan: bool = False, workers: Optional[int] = None) -> IlsReport:
    """
    ℙ{s_ω − n q₋ ≤ L₀^{β−1}}, the gap event behind the initial-scale estimate.

    With ns_scan the cube is also classified on a uniform grid over I_n with
    spacing at most e^{−L₀^β}/4; that part is grid-approximate.
    """
    L0, n = box.L, box.n
    mass = ils_mass(L0, beta)
    eps0 = L0 ** (beta - 1) / 2
    grid: Tuple[float, ...] = ()
    if ns_scan:
        q = factory.law.q_minus
        grid = energy_grid(n * q - 0.5, n * q + eps0, L0, beta)
    fn = partial(_ils_trial, factory, box, L0 ** (beta - 1), grid, mass, seed)
    results = TrialPool(workers).map(fn, range(trials))
    gap = McEstimate.from_counts(sum(1 for g, _ in results if g), trials, seed)
    scan = McEstimate.from_counts(sum(1 for _, s in results if s), trials, seed) if ns_scan else None
    return IlsReport(L0, beta, mass, eps0, gap, scan, len(grid))


@dataclass
class DsReport:
    n: int
    k: int
    L: int
    mass: float
    estimate: McEstimate
    target: float
    margin: float
    grid_points: int
    spacing: float
    pair: Tuple[Dict[str, Any], Dict[str, Any]]


def _ds_trial(factory: OperatorFactory, first: BoxSpec, second: BoxSpec, grid: Sequence[float], mass: float,
              base: int, index: int) -> bool:
    trial = factory.with_seed(mix(base, index))
    op1, op2 = trial(first), trial(second)
    for E in grid:
        if not classify_NS(op1, first, E, mass).ns and not classify_NS(op2, second, E, mass).ns:
            return True
    return False


def mc_ds(factory: OperatorFactory, n: int, k: int, schedule: ScaleSchedule, trials: int, seed: int,
          r0: int = 1, grid_points: int = 8, workers: Optional[int] = None) -> DsReport:
    """
    ℙ{∃E ∈ I_n : both cubes of a separable pair are (E, m_{L_k})-singular}.

    Energies are scanned on a uniform grid over I_n with spacing at most
    e^{−L_k^β}/4 and at least grid_points points (grid-approximate). The target
    L_k^{−2p_n(1+θ)^k} is reported with the margin, never asserted.
    """
    if not factory.law.is_holder_continuous:
        raise PreconditionError(f"Law {factory.law.kind.value} is not Hölder continuous")
    L = schedule.L[k]
    mass = float(schedule.m[k])
    first, second = separated_pair(n, schedule.d, L, r0)
    lo, hi = schedule.interval(n)
    grid = energy_grid(lo, hi, L, float(schedule.beta), grid_points)
    fn = partial(_ds_trial, factory, first, second, grid, mass, seed)
    hits = TrialPool(workers).count(fn, trials)
    estimate = McEstimate.from_counts(hits, trials, seed)
    target = ds_target(schedule, n, k)
    return DsReport(n, k, L, mass, estimate, target, target - estimate.upper_bound, len(grid),
                    grid[1] - grid[0], (first.to_dict(), second.to_dict()))
