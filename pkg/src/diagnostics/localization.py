"""
Localization length of eigenfunctions: fitted exponential decay of cell norms.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.fem.assembly import AssembledOperator
from src.geometry.lattice import sup_distance
from src.spectral.engine import eigs_up_to
from src.utils.errors import InconclusiveError, PreconditionError

logger = logging.getLogger("diagnostic.localization")

NORM_FLOOR = 1e-12


@dataclass
class MassFit:
    mass: float
    r_squared: float
    interval: Tuple[float, float]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.rows)


def fit_decay_rate(distances: Sequence[float], norms: Sequence[float]) -> Tuple[float, float]:
    """Least-squares m̂ with log norm ≈ c − m̂·distance, and the R² of the fit."""
    x = np.asarray(distances, dtype=float)
    y = np.log(np.asarray(norms, dtype=float))
    if x.size < 2 or np.ptp(x) == 0:
        raise InconclusiveError("Decay fit needs at least two distinct distances")
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(-slope), r2


def box_cells(op: AssembledOperator) -> List[Tuple[int, ...]]:
    """Lattice points x of R^{nd} with |x^{(i)} − u^{(i)}| ≤ L_i − 1 for every particle."""
    axes = []
    for center, L in zip(op.box.center, op.box.sides):
        axes.extend(range(c - L + 1, c + L) for c in center)
    return [tuple(x) for x in itertools.product(*axes)]


def cell_norms(op: AssembledOperator, vector: np.ndarray, cells: Sequence[Tuple[int, ...]]) -> np.ndarray:
    """‖χ_x ψ‖ for each cell, in the mass-matrix norm restricted to the cell."""
    norms = np.zeros(len(cells))
    for i, x in enumerate(cells):
        dofs = op.dofmap.cell_dofs(x)
        if dofs.size:
            v = vector[dofs]
            norms[i] = np.sqrt(max(float(v @ (op.B[dofs][:, dofs] @ v)), 0.0))
    return norms


def eigenfunction_mass(op: AssembledOperator, interval: Tuple[float, float],
                       cells: Optional[Iterable[Sequence[int]]] = None) -> MassFit:
    """
    Decay mass of every eigenfunction with eigenvalue in the interval.

    Per eigenpair, log ‖χ_x ψ‖ is fitted against |x − x_max| over cells whose
    norm exceeds NORM_FLOOR times the peak. The reported mass is the mean over
    eigenpairs and R² the worst fit.
    """
    lo, hi = interval
    if lo > hi:
        raise PreconditionError(f"Empty energy interval {interval}")
    result = eigs_up_to(op, hi)
    mask = (result.eigenvalues >= lo) & (result.eigenvalues <= hi)
    if not mask.any():
        raise PreconditionError(f"No eigenvalue of the box in {interval}")
    cells = box_cells(op) if cells is None else [tuple(int(c) for c in x) for x in cells]

    rows = []
    for index in np.nonzero(mask)[0]:
        norms = cell_norms(op, result.eigenvectors[:, index], cells)
        peak = int(np.argmax(norms))
        keep = norms > NORM_FLOOR * norms[peak]
        distances = [sup_distance(cells[peak], x) for x, k in zip(cells, keep) if k]
        m_hat, r2 = fit_decay_rate(distances, norms[keep])
        rows.append({
            "index": int(index),
            "energy": float(result.eigenvalues[index]),
            "x_max": list(cells[peak]),
            "cells": int(keep.sum()),
            "mass": m_hat,
            "r_squared": r2,
        })
        logger.debug(f"Eigenpair {index} at E={result.eigenvalues[index]:.6f}: m={m_hat:.4f} R2={r2:.3f}")
    mass = float(np.mean([row["mass"] for row in rows]))
    r2 = float(min(row["r_squared"] for row in rows))
    logger.info(f"Mass fit over {len(rows)} eigenfunctions in {interval}: m={mass:.4f}, min R2={r2:.3f}")
    return MassFit(mass, r2, (float(lo), float(hi)), rows)
