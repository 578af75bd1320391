"""
Random potential: per-edge disorder draws, the n-particle potential W,
the interaction U and the concentration modulus s(μ, ε).
"""

import csv
import logging
from itertools import combinations
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from scipy.special import betainc, betaincinv

from src.models.disorder import InteractionKernel, InteractionSpec, OmegaSample, PotentialKind, PotentialLaw
from src.models.geometry import CubeId, EdgeId
from src.utils.errors import ConfigurationError, GeometryError
from src.utils.seeding import edge_uniform

logger = logging.getLogger("random_model")

OMEGA_SCHEMA = "omega"


def quantile(law: PotentialLaw, u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Inverse CDF of the law at uniform level(s) u."""
    if law.kind == PotentialKind.POINT_MASS:
        return law.q_minus + 0.0 * np.asarray(u, dtype=float)
    if law.kind == PotentialKind.UNIFORM:
        return law.q_minus + law.width * np.asarray(u, dtype=float)
    return law.q_minus + law.width * betaincinv(law.shape, law.shape, u)


def sample_omega(law: PotentialLaw, edges: Sequence[EdgeId], seed: int) -> OmegaSample:
    """I.i.d. per-edge draws; each value depends only on (seed, edge)."""
    if len(edges) == 0:
        raise GeometryError("sample_omega needs a nonempty edge list")
    unique = sorted(set(edges))
    levels = np.array([edge_uniform(seed, e) for e in unique])
    values = np.clip(quantile(law, levels), law.q_minus, law.q_plus)
    return OmegaSample({e: float(v) for e, v in zip(unique, values)}, seed=int(seed), law=law)


def constant_omega(edges: Sequence[EdgeId], value: float) -> OmegaSample:
    return OmegaSample({e: float(value) for e in edges})


def eval_W(cube: CubeId, omega: OmegaSample) -> float:
    """W = ω_{e_1} + ... + ω_{e_n}, constant on the cube."""
    return float(sum(omega[e] for e in cube.edges))


def eval_U(points: np.ndarray, spec: InteractionSpec) -> np.ndarray:
    """
    Two-body interaction at configuration(s) of shape (..., n, d).

    F is evaluated in sup norm and vanishes for |x_i - x_j| >= r0.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[-2]
    total = np.zeros(points.shape[:-2])
    if n < 2 or spec.u0 == 0.0:
        return total
    for i, j in combinations(range(n), 2):
        dist = np.abs(points[..., i, :] - points[..., j, :]).max(axis=-1)
        if spec.kernel == InteractionKernel.HARD_INDICATOR:
            total += spec.u0 * (dist < spec.r0)
        else:
            total += spec.u0 * np.clip(1.0 - dist / spec.r0, 0.0, None)
    return total


def concentration(law: PotentialLaw, eps: float) -> float:
    """s(μ, ε) = sup of μ[a, b] over intervals of length at most ε."""
    if eps < 0:
        raise ConfigurationError(f"Concentration needs eps >= 0, got {eps}")
    if law.kind == PotentialKind.POINT_MASS:
        return 1.0
    if eps == 0:
        return 0.0
    rel = eps / law.width
    if rel >= 1.0:
        return 1.0
    if law.kind == PotentialKind.UNIFORM:
        return rel
    a = law.shape
    if a >= 1.0:
        return float(betainc(a, a, 0.5 + rel / 2) - betainc(a, a, 0.5 - rel / 2))
    return float(betainc(a, a, rel))


def export_omega(omega: OmegaSample, path: Union[str, Path], version: str) -> Path:
    """Write an omega sample as CSV (edge address, value) for replay."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        handle.write(f"# qgraph-loc v{version} schema={OMEGA_SCHEMA} seed={omega.seed}\n")
        writer = csv.writer(handle)
        writer.writerow(["edge", "value"])
        for edge in sorted(omega.values):
            writer.writerow([edge.address(), repr(omega.values[edge])])
    logger.debug(f"Exported {len(omega)} omega values to {path}")
    return path


def import_omega(path: Union[str, Path]) -> OmegaSample:
    path = Path(path)
    seed = None
    values = {}
    with path.open(newline="") as handle:
        first = handle.readline()
        if "seed=" in first:
            token = first.rsplit("seed=", 1)[1].strip()
            seed = None if token == "None" else int(token)
        reader = csv.DictReader(handle)
        for row in reader:
            values[EdgeId.from_address(row["edge"])] = float(row["value"])
    return OmegaSample(values, seed=seed)


def holder_certificate(law: PotentialLaw, exponents: Sequence[int] = tuple(range(1, 21))) -> List[dict]:
    """s(μ, 2^-k) against c_μ (2^-k)^b on a dyadic grid."""
    rows = []
    for k in exponents:
        eps = 2.0 ** (-k)
        measured = concentration(law, eps)
        bound = law.holder_constant * eps ** law.holder_exponent
        rows.append({"eps": eps, "s": measured, "bound": bound, "pass": bool(measured <= bound * (1 + 1e-12))})
    return rows
