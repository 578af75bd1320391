"""
Tests for finite-element assembly on the glued cube complex.
"""

import numpy as np
import pytest

from src.diagnostics.estimates import free_operator, kronecker_check
from src.fem.assembly import assemble_decomposed, check_decomposable, to_triplets
from src.geometry.lattice import count_cubes
from src.models.disorder import Mesh
from src.models.geometry import BoxSpec
from src.utils.errors import NotDecomposableError


def test_matrices_are_symmetric(factory):
    op = factory(BoxSpec.cube(((0,), (1,)), 2))
    assert abs(op.A - op.A.T).max() < 1e-12
    assert abs(op.B - op.B.T).max() < 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_total_mass_is_cube_count(factory, n):
    """Each unit cube contributes volume one."""
    box = BoxSpec.cube(tuple((0,) for _ in range(n)), 2)
    op = factory(box)
    ones = np.ones(op.size)
    assert ones @ (op.B @ ones) == pytest.approx(count_cubes(n, 1, (2,) * n))


def test_constants_solve_the_free_problem(interval_box):
    op = free_operator(interval_box, Mesh(M=4))
    assert op.size == 17
    assert np.abs(op.A @ np.ones(op.size)).max() < 1e-12


def test_constant_potential_shifts_by_mass(interval_box):
    op = free_operator(interval_box, Mesh(M=4), value=0.7)
    ones = np.ones(op.size)
    assert np.allclose(op.A @ ones, 0.7 * (op.B @ ones))


def test_floor_is_n_times_minimum(factory):
    box = BoxSpec.cube(((0,), (0,)), 2)
    op = factory(box)
    omega = factory.omega(box)
    assert op.floor == pytest.approx(2 * min(omega.values.values()))


def test_same_seed_same_operator(factory):
    box = BoxSpec.cube(((0,), (1,)), 1)
    first, second = factory(box), factory(box)
    assert abs(first.A - second.A).max() == 0.0
    assert abs(factory.with_seed(8)(box).A - first.A).max() > 0.0


def test_decoupled_complex_has_private_nodes(factory):
    box = BoxSpec.cube(((0,),), 2)
    op = factory(box, decoupled=True)
    assert op.size == 4 * 3
    assert op.meta["decoupled"] is True


def test_decomposability_is_checked(factory):
    with pytest.raises(NotDecomposableError):
        check_decomposable(BoxSpec.cube(((0,), (3,)), 2), (0,), 1)
    first, second = assemble_decomposed(BoxSpec.cube(((0,), (10,)), 2), (0,),
                                        factory.omega(BoxSpec.cube(((0,), (10,)), 2)),
                                        factory.interaction, factory.mesh)
    assert first.n == second.n == 1


def test_kronecker_structure_of_decomposable_cube(factory):
    """Spectrum of a decomposable cube equals sums of factor eigenvalues."""
    check = kronecker_check(factory, BoxSpec.cube(((0,), (10,)), 2), r0=1, count=10)
    assert check.passed
    assert check.matrix_error < 1e-12
    assert check.max_relative_error <= 1e-9


def test_triplets_are_sorted(interval_box):
    op = free_operator(interval_box, Mesh(M=2))
    rows, cols, values = to_triplets(op.A)
    keys = list(zip(rows.tolist(), cols.tolist()))
    assert keys == sorted(keys)
    assert len(values) == op.A.nnz
