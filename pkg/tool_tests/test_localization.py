"""
Tests for the eigenfunction decay fit.
"""

import numpy as np
import pytest

from src.diagnostics.localization import box_cells, cell_norms, eigenfunction_mass, fit_decay_rate
from src.models.geometry import BoxSpec
from src.spectral.engine import b_norm, lowest_eigs
from src.utils.errors import InconclusiveError, PreconditionError


def test_fit_recovers_synthetic_rate():
    distances = np.arange(7)
    mass, r2 = fit_decay_rate(distances, np.exp(-distances))
    assert mass == pytest.approx(1.0, abs=1e-9)
    assert r2 == pytest.approx(1.0)


def test_flat_profile_has_zero_mass():
    mass, r2 = fit_decay_rate([0, 1, 2], [0.5, 0.5, 0.5])
    assert mass == pytest.approx(0.0, abs=1e-12)
    assert r2 == 1.0


def test_fit_needs_two_distances():
    with pytest.raises(InconclusiveError):
        fit_decay_rate([2, 2, 2], [1.0, 0.5, 0.2])


def test_box_cells_cover_the_box():
    op_box = BoxSpec.cube(((0,), (4,)), 2)

    class _Op:
        box = op_box

    assert len(box_cells(_Op())) == 9
    assert (0, 4) in box_cells(_Op())


def test_cell_norms_of_ground_state(factory, interval_box):
    op = factory(interval_box)
    ground = lowest_eigs(op, 1).eigenvectors[:, 0]
    norms = cell_norms(op, ground, box_cells(op))
    assert b_norm(op, ground) == pytest.approx(1.0)
    assert np.all(norms > 0)


def test_mass_fit_rows(factory):
    op = factory(BoxSpec.cube(((0,),), 4))
    energies = lowest_eigs(op, 3).eigenvalues
    fit = eigenfunction_mass(op, (float(energies[0]) - 1e-9, float(energies[2]) + 1e-9))
    assert fit.count == 3
    assert all(row["cells"] >= 2 for row in fit.rows)
    assert fit.r_squared <= 1.0


def test_mass_fit_preconditions(factory, interval_box):
    op = factory(interval_box)
    with pytest.raises(PreconditionError):
        eigenfunction_mass(op, (1.0, 0.0))
    with pytest.raises(PreconditionError):
        eigenfunction_mass(op, (-10.0, -5.0))
