"""
Tests for disorder sampling, the interaction and the concentration modulus.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.disorder.random_model import (
    concentration, eval_U, eval_W, export_omega, holder_certificate, import_omega, sample_omega,
)
from src.geometry.lattice import enumerate_cubes, enumerate_edges
from src.models.disorder import InteractionSpec, Mesh, OmegaSample, PotentialLaw
from src.models.geometry import BoxSpec, EdgeId
from src.utils.errors import ConfigurationError, MeshTooCoarseError, MissingEdgeError
from src.utils.seeding import edge_uniform, mix


def test_samples_depend_only_on_seed_and_edge(uniform_law):
    """A larger box reproduces the values of every shared edge."""
    small = sample_omega(uniform_law, enumerate_edges(2, 2), seed=11)
    large = sample_omega(uniform_law, enumerate_edges(2, 3), seed=11)
    assert all(large[e] == small[e] for e in small.values)
    other = sample_omega(uniform_law, enumerate_edges(2, 2), seed=12)
    assert any(other[e] != small[e] for e in small.values)


def test_samples_stay_in_support():
    law = PotentialLaw(kind="beta_smoothed", q_minus=-1.0, q_plus=2.0, shape=0.5)
    omega = sample_omega(law, enumerate_edges(1, 20), seed=3)
    values = np.array(list(omega.values.values()))
    assert values.min() >= -1.0
    assert values.max() <= 2.0


def test_point_mass_law_is_constant():
    law = PotentialLaw(kind="point_mass", q_minus=0.5, q_plus=3.0)
    assert law.q_plus == 0.5
    omega = sample_omega(law, enumerate_edges(1, 3), seed=1)
    assert set(omega.values.values()) == {0.5}


def test_invalid_support_rejected():
    with pytest.raises(ValidationError):
        PotentialLaw(kind="uniform", q_minus=1.0, q_plus=0.0)


def test_coarse_mesh_rejected():
    with pytest.raises(MeshTooCoarseError):
        Mesh(M=1)


def test_missing_edge_raises():
    omega = OmegaSample({EdgeId((0,), 1): 0.3})
    with pytest.raises(MissingEdgeError):
        omega[EdgeId((1,), 1)]


def test_potential_sums_particle_edges(uniform_law):
    box = BoxSpec.cube(((0,), (0,)), 1)
    omega = sample_omega(uniform_law, enumerate_edges(1, 1), seed=5)
    for cube in enumerate_cubes(box):
        assert eval_W(cube, omega) == pytest.approx(sum(omega[e] for e in cube.edges))


def test_hard_interaction():
    spec = InteractionSpec(u0=2.0, r0=1)
    points = np.array([[[0.0], [0.5]], [[0.0], [1.0]]])
    assert eval_U(points, spec).tolist() == [2.0, 0.0]
    assert spec.bound(3) == 6.0


def test_triangular_interaction():
    spec = InteractionSpec(u0=2.0, r0=1, kernel="triangular_bump")
    assert float(eval_U(np.array([[0.0], [0.5]]), spec)) == pytest.approx(1.0)


def test_concentration_modulus():
    law = PotentialLaw(kind="uniform", q_minus=0.0, q_plus=2.0)
    assert concentration(law, 0.5) == pytest.approx(0.25)
    assert concentration(law, 5.0) == 1.0
    assert concentration(PotentialLaw(kind="point_mass"), 1e-6) == 1.0
    with pytest.raises(ConfigurationError):
        concentration(law, -0.1)


@pytest.mark.parametrize("kind,shape", [("uniform", 2.0), ("beta_smoothed", 2.0), ("beta_smoothed", 0.5)])
def test_holder_certificate(kind, shape):
    law = PotentialLaw(kind=kind, shape=shape)
    assert all(row["pass"] for row in holder_certificate(law))


def test_omega_restriction_keeps_values(uniform_law):
    outer, inner = enumerate_edges(1, 4), enumerate_edges(1, 2)
    omega = sample_omega(uniform_law, outer, seed=5)
    part = omega.restrict(inner)
    assert omega.covers(inner)
    assert len(part) == len(inner)
    assert not part.covers(outer)
    assert all(part[e] == omega[e] for e in inner)
    assert part.seed == 5


def test_omega_replay(tmp_path, uniform_law):
    """An exported sample replays to identical values."""
    omega = sample_omega(uniform_law, enumerate_edges(2, 2), seed=9)
    path = export_omega(omega, tmp_path / "omega.csv", "0.1.0")
    assert path.read_text().splitlines()[0] == "# qgraph-loc v0.1.0 schema=omega seed=9"
    replay = import_omega(path)
    assert replay.seed == 9
    assert replay.values == omega.values


def test_seed_derivation_is_pure():
    edge = EdgeId((3, -2), 1)
    assert edge_uniform(4, edge) == edge_uniform(4, edge)
    assert 0.0 <= edge_uniform(4, edge) < 1.0
    assert mix(1, 2) == mix(1, 2)
    assert mix(1, 2) != mix(1, 3)
