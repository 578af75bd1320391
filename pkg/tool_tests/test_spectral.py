"""
Tests for eigenvalues, resolvents and the heat semigroup.
"""

import math

import numpy as np
import pytest

from src.diagnostics.estimates import free_operator
from src.models.disorder import Mesh
from src.models.geometry import BoxSpec
from src.spectral.engine import (
    GreenFunction, b_norm, count_below, dist_to_spectrum, dyn_moment, eigs_up_to, full_spectrum,
    lowest_eigs, semigroup_pair, weyl_constant,
)
from src.utils.errors import PreconditionError, ResonanceError


@pytest.fixture
def free_interval(interval_box):
    return free_operator(interval_box, Mesh(M=8))


def test_free_interval_spectrum(free_interval):
    """Neumann eigenvalues (kπ/4)² of the interval of length four."""
    vals = lowest_eigs(free_interval, 3).eigenvalues
    assert abs(vals[0]) < 1e-9
    assert vals[1] == pytest.approx((math.pi / 4) ** 2, abs=5e-3)
    assert vals[2] == pytest.approx((math.pi / 2) ** 2, abs=2e-2)


def test_constant_potential_shifts_spectrum(interval_box):
    vals = lowest_eigs(free_operator(interval_box, Mesh(M=4), value=0.3), 2).eigenvalues
    assert vals[0] == pytest.approx(0.3, abs=1e-9)


def test_eigenvectors_are_mass_orthonormal(factory):
    op = factory(BoxSpec.cube(((0,), (0,)), 1))
    result = lowest_eigs(op, 4)
    V = result.eigenvectors
    assert np.allclose(V.T @ (op.B @ V), np.eye(4), atol=1e-9)
    assert np.all(np.diff(result.eigenvalues) >= 0)
    assert np.all(result.eigenvalues >= op.floor - 1e-9)


def test_lowest_eigs_bounds(free_interval):
    with pytest.raises(PreconditionError):
        lowest_eigs(free_interval, 0)


def test_count_below_matches_full_spectrum(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    expected = int(np.sum(full_spectrum(op).eigenvalues <= 4.0))
    assert count_below(op, 4.0) == expected


def test_eigs_up_to_passes_ceiling(free_interval):
    result = eigs_up_to(free_interval, 1.0, k_start=2)
    assert result.complete or result.eigenvalues[-1] > 1.0


def test_weyl_constant():
    assert weyl_constant(2, 1, 4 * math.pi, 0.0) == 2
    assert weyl_constant(1, 1, 0.0, 0.0) == 1


def test_distance_to_spectrum(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    vals = full_spectrum(op).eigenvalues
    assert dist_to_spectrum(op, 0.9) == pytest.approx(float(np.min(np.abs(vals - 0.9))))


def test_resonant_energy_raises(free_interval):
    with pytest.raises(ResonanceError):
        GreenFunction(free_interval, 0.0)


def test_green_function_decays_below_spectrum():
    op = free_operator(BoxSpec.cube(((0,),), 6), Mesh(M=4))
    green = GreenFunction(op, -1.0)
    norms = green.sweep((0,), [(1,), (3,), (5,)])
    assert np.all(norms > 0)
    assert norms[0] > norms[1] > norms[2]
    assert green.block_norm((3,), (0,)).norm == pytest.approx(norms[1])


def test_resolvent_solve_identity(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    green = GreenFunction(op, -0.5)
    rhs = np.ones(op.size)
    assert np.allclose(green.shifted @ green.solve(rhs), rhs)


def test_semigroup_dense_and_lanczos_agree(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    rng = np.random.default_rng(0)
    f, g = rng.standard_normal(op.size), rng.standard_normal(op.size)
    dense = semigroup_pair(op, f, g, 1.0, dense=True)
    krylov = semigroup_pair(op, f, g, 1.0, dense=False)
    assert krylov.method == "lanczos"
    assert krylov.value == pytest.approx(dense.value, abs=1e-8 * b_norm(op, f) * b_norm(op, g))


def test_semigroup_rejects_non_positive_time(free_interval):
    v = np.ones(free_interval.size)
    with pytest.raises(PreconditionError):
        semigroup_pair(free_interval, v, v, 0.0)


def test_dynamical_moment_of_empty_window(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    assert dyn_moment(op, (-10.0, -5.0), [(0,)], 2.0, lambda E: np.ones_like(E)) == 0.0
    with pytest.raises(PreconditionError):
        dyn_moment(op, (0.0, 1.0), [(0,)], -1.0, lambda E: np.ones_like(E))


def test_dynamical_moment_is_non_negative(factory):
    op = factory(BoxSpec.cube(((0,),), 3))
    value = dyn_moment(op, (op.floor - 1.0, op.floor + 2.0), [(0,), (1,)], 1.0, lambda E: np.ones_like(E))
    assert value >= 0.0
