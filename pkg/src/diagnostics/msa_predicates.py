"""
Multi-scale predicates for a single disorder sample.

All predicates take an OperatorFactory so sub-cubes and factor cubes see the
same edge values as the cube they belong to.
"""

import itertools
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.config.settings import settings
from src.fem.assembly import AssembledOperator, OperatorFactory
from src.geometry.lattice import count_sub_cubes, out_layer, sub_cubes
from src.geometry.separability import Interactivity, classify_interactive, separability
from src.models.geometry import BoxSpec
from src.models.reports import MsaPredicateReport
from src.spectral.engine import GreenFunction, dist_to_spectrum, eigs_up_to
from src.utils.errors import GeometryError, ResonanceError
from src.utils.seeding import generator

logger = logging.getLogger("diagnostic.msa_predicates")

ALPHA = 1.5
BETA = 0.5
DEFAULT_J = 6


def classify_NS(op: AssembledOperator, cube: BoxSpec, E: float, m: float) -> MsaPredicateReport:
    """(E, m)-non-singular iff max over the out-layer of ‖G(u, y; E)‖ ≤ e^{−mL}."""
    L = cube.L
    u = tuple(int(c) for c in cube.flat_center())
    try:
        green = GreenFunction(op, E)
    except ResonanceError as exc:
        return MsaPredicateReport(cube=cube, energy=E, mass=m, ns=False, resonant=True,
                                  witnesses={"distance": exc.distance})
    layer = out_layer(u, L)
    norms = green.sweep(u, layer)
    worst = int(np.argmax(norms))
    threshold = math.exp(-m * L)
    return MsaPredicateReport(
        cube=cube, energy=E, mass=m, ns=bool(norms[worst] <= threshold),
        witnesses={
            "y": list(layer[worst]),
            "max_norm": float(norms[worst]),
            "threshold": threshold,
            "distance": green.distance,
            "resolvent_bound": 1.0 / green.distance,
        },
    )


def is_non_resonant(op: AssembledOperator, E: float, L: int) -> Tuple[bool, float]:
    """dist(σ(H), E) ≥ e^{−L^β}."""
    distance = dist_to_spectrum(op, E)
    return distance >= math.exp(-L ** BETA), distance


def _scales(L: int) -> List[int]:
    lowest = max(1, math.ceil(L ** (1 / ALPHA) - 1e-12))
    return list(range(lowest, L + 1))


def _sample_sub_cubes(cube: BoxSpec, scales: Sequence[int], k: int, seed: int) -> List[BoxSpec]:
    rng = generator(seed)
    L = cube.L
    dim = cube.n * cube.d
    weights = np.array([float(count_sub_cubes(cube, ell)) for ell in scales])
    weights /= weights.sum()
    flat = cube.flat_center()
    chosen = {(L, tuple(flat))}
    attempts = 0
    while len(chosen) < k + 1 and attempts < 50 * k:
        attempts += 1
        ell = int(scales[rng.choice(len(scales), p=weights)])
        offset = rng.integers(-(L - ell), L - ell + 1, size=dim)
        chosen.add((ell, tuple(int(c) for c in flat + offset)))
    boxes = []
    for ell, center in sorted(chosen, key=lambda item: (-item[0], item[1])):
        boxes.append(BoxSpec.cube(tuple(tuple(center[i * cube.d:(i + 1) * cube.d]) for i in range(cube.n)), ell))
    return boxes


def cnr_sub_cubes(cube: BoxSpec, budget: Optional[int] = None, seed: int = 0) -> Tuple[List[BoxSpec], bool]:
    """Sub-cubes tested for complete non-resonance and whether they are a sample."""
    budget = settings.cnr_budget if budget is None else budget
    scales = _scales(cube.L)
    total = sum(count_sub_cubes(cube, ell) for ell in scales)
    if total <= budget:
        return [box for ell in reversed(scales) for box in sub_cubes(cube, ell)], False
    logger.info(f"CNR over {total} sub-cubes exceeds budget {budget}; sampling")
    return _sample_sub_cubes(cube, scales, budget - 1, seed), True


def check_NR_CNR(factory: OperatorFactory, cube: BoxSpec, E: float, budget: Optional[int] = None,
                 seed: int = 0) -> MsaPredicateReport:
    """E-NR of the cube and E-NR of every sub-cube of side in [L^{2/3}, L] (or a seeded sample)."""
    boxes, sampled = cnr_sub_cubes(cube, budget, seed)
    nr, distance = is_non_resonant(factory(cube), E, cube.L)
    cnr = nr
    witness: Dict[str, Any] = {"distance": distance, "tested": len(boxes)}
    if nr:
        for box in boxes:
            if box == cube:
                continue
            ok, dist = is_non_resonant(factory(box), E, box.L)
            if not ok:
                cnr = False
                witness["resonant_sub_cube"] = box.to_dict()
                witness["sub_cube_distance"] = dist
                break
    return MsaPredicateReport(cube=cube, energy=E, nr=nr, cnr=cnr, cnr_sampled=sampled, witnesses=witness)


def check_good(factory: OperatorFactory, cube: BoxSpec, E: float, m: float, ell: int, J: int = DEFAULT_J,
               r0: int = 1, budget: Optional[int] = None) -> MsaPredicateReport:
    """
    (E, m, J)-good iff at most J pairwise separable ℓ-sub-cubes are (E, m)-singular.

    The largest pairwise separable family is a maximum clique of the separability
    graph on the singular sub-cubes.
    """
    if ell < 7:
        raise GeometryError(f"Singularity needs sub-cube side >= 7, got {ell}")
    budget = settings.cnr_budget if budget is None else budget
    if count_sub_cubes(cube, ell) > budget:
        boxes = _sample_sub_cubes(cube, [ell], budget, 0)
        boxes = [box for box in boxes if box.L == ell]
        sampled = True
    else:
        boxes = list(sub_cubes(cube, ell))
        sampled = False
    singular = [box for box in boxes if not classify_NS(factory(box), box, E, m).ns]

    graph = nx.Graph()
    graph.add_nodes_from(range(len(singular)))
    for i, j in itertools.combinations(range(len(singular)), 2):
        if separability(singular[i].center, singular[j].center, ell, r0).separable:
            graph.add_edge(i, j)
    clique: List[int] = []
    if singular:
        clique, _ = nx.max_weight_clique(graph, weight=None)
    return MsaPredicateReport(
        cube=cube, energy=E, mass=m, good=len(clique) <= J, J=J, cnr_sampled=sampled,
        witnesses={
            "singular": len(singular),
            "tested": len(boxes),
            "separable_family": [singular[i].to_dict() for i in clique],
        },
    )


def check_NT_HNR(factory: OperatorFactory, cube: BoxSpec, E: float, m_prev: float, ell: int,
                 q_minus: float, r0: int = 1, budget: Optional[int] = None) -> MsaPredicateReport:
    """
    Non-tunneling and high non-resonance of a partially interactive cube.

    Each factor is tested at the energies shifted by the other factor's
    eigenvalues. Shifts below n'q₋ − 1/2 lie a gap of at least 1/2 below the
    factor spectrum and count as good and non-resonant without a solve.
    """
    report = classify_interactive(cube.center, cube.L, r0)
    if report.kind != Interactivity.PARTIALLY_INTERACTIVE:
        raise GeometryError(f"Cube at {cube.center} is not partially interactive")
    J = report.partition
    Jc = tuple(i for i in range(cube.n) if i not in J)
    factors = {"J": cube.factor(J), "Jc": cube.factor(Jc)}
    other = {"J": "Jc", "Jc": "J"}
    ops = {key: factory(box) for key, box in factors.items()}

    nt = hnr = True
    witnesses: Dict[str, Any] = {"partition": list(J), "auto_good": 0, "checked": 0}
    # A factor smaller than ell holds no ell-sub-cube, so NT holds trivially there.
    witnesses["nt_vacuous"] = any(box.L < ell for box in factors.values())
    if witnesses["nt_vacuous"]:
        logger.debug(f"NT vacuous for cube at {cube.center}: factor side below ell={ell}")
    for key, box in factors.items():
        cutoff = box.n * q_minus - 0.5
        shifts_op = ops[other[key]]
        spectrum = eigs_up_to(shifts_op, E - cutoff).eigenvalues
        retained = spectrum[E - spectrum >= cutoff]
        witnesses["auto_good"] += int(spectrum.size - retained.size)
        for index, mu in enumerate(retained):
            shifted = float(E - mu)
            witnesses["checked"] += 1
            if nt and box.L >= ell:
                good = check_good(factory, box, shifted, m_prev, ell, J=1, r0=r0, budget=budget)
                if not good.good:
                    nt = False
                    witnesses["tunneling"] = {"factor": key, "index": index, "energy": shifted, "ell": ell}
            if hnr:
                cnr = check_NR_CNR(factory, box, shifted, budget)
                if not cnr.cnr:
                    hnr = False
                    witnesses["resonance"] = {"factor": key, "index": index, "energy": shifted,
                                              "sub_cube": cnr.witnesses.get("resonant_sub_cube", box.to_dict())}
    return MsaPredicateReport(cube=cube, energy=E, mass=m_prev, nt=nt, hnr=hnr, witnesses=witnesses)


