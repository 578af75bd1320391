"""
Tests for the diagnostic registry and the per-sample diagnostics.
"""

import math

import pytest

from src.diagnostics import diagnostic_registry
from src.diagnostics.base_diagnostic import box_from, center_from, law_from
from src.diagnostics.estimates import NeumannConvergence, ct_bessel_bound, ct_bound, dg_bound
from src.models.disorder import PotentialKind
from src.utils.errors import ConfigurationError, PreconditionError


def test_every_diagnostic_is_registered():
    names = set(diagnostic_registry.list_diagnostics())
    assert names == {
        "geometry", "schedule", "assemble", "spectrum", "green", "ct-check", "dg-check", "wegner1", "wegner2",
        "lifshitz", "ils", "ds", "gri-audit", "mass-fit", "dyn-moment", "cheeger", "weyl", "kronecker", "neumann",
    }
    assert all("properties" in schema for schema in diagnostic_registry.get_all_schemas().values())


def test_unknown_diagnostic():
    response = diagnostic_registry.execute("nope")
    assert not response.success
    assert response.exit_code == 2


def test_missing_parameters():
    response = diagnostic_registry.execute("green", n=1)
    assert not response.success
    assert response.exit_code == 2
    assert "E" in response.error


def test_parameter_helpers():
    assert center_from(None, 2, 1) == ((0,), (0,))
    assert center_from([1, 2, 3, 4], 2, 2) == ((1, 2), (3, 4))
    with pytest.raises(ConfigurationError):
        center_from([1, 2, 3], 2, 2)
    box = box_from({"n": 2, "d": 1, "L": 3, "sides": [3, 4]})
    assert box.sides == (3, 4)
    assert law_from({"law": "beta_smoothed", "shape": 0.5}).kind == PotentialKind.BETA_SMOOTHED
    with pytest.raises(ConfigurationError) as exc:
        law_from({"law": "uniform", "q_minus": 2.0, "q_plus": 1.0})
    assert exc.value.field_path.startswith("law")


def test_combes_thomas_constant():
    assert ct_bound(10, 0.25) == pytest.approx(0.0812, abs=1e-4)
    assert ct_bessel_bound(10, 0.25) <= ct_bound(10, 0.25)
    with pytest.raises(PreconditionError):
        ct_bound(0, 0.25)


def test_davies_gaffney_constant():
    assert dg_bound(1.0, 0.0, 2.0) == pytest.approx(math.exp(-1.0))


def test_geometry_counts():
    response = diagnostic_registry.execute("geometry", check="counts", d_max=2, L_max=2, n_max=2)
    assert response.success
    assert response.passed
    assert response.data["cases"] == 8


def test_geometry_bad_grid_code():
    response = diagnostic_registry.execute("geometry", exhaustive="x1y2")
    assert response.exit_code == 2


def test_geometry_interactivity():
    response = diagnostic_registry.execute("geometry", check="interactivity", n=2, d=1, L=2,
                                           center=[[0], [10]])
    assert response.data["kind"] == "PI"
    assert response.data["partition"] == (0,)


def test_schedule_diagnostic():
    response = diagnostic_registry.execute("schedule", N=2, d=1, p1=2000, L0=1000, K=1)
    assert response.success
    assert response.data["L"] == [1000, 31623]
    assert response.data["radii_consistent"]
    assert [row["k"] for row in response.rows] == [0, 1]


def test_schedule_infeasible_exit_code():
    response = diagnostic_registry.execute("schedule", N=2, d=1, p1=5, L0=1000, K=1)
    assert not response.success
    assert response.exit_code == 1
    assert response.error_type == "FeasibilityError"


def test_assemble_exports_triplets_and_omega():
    response = diagnostic_registry.execute("assemble", n=1, d=1, L=2, M=2, seed=1)
    assert response.success
    assert response.schema_name == "triplets"
    assert response.data["dofs"] == 9
    assert {row["matrix"] for row in response.rows} == {"A", "B"}
    assert len(response.tables["omega"]) == 4


def test_spectrum_diagnostic():
    response = diagnostic_registry.execute("spectrum", n=1, d=1, L=2, M=2, k=3, S=2.0)
    assert response.success
    energies = [row["eigenvalue"] for row in response.rows]
    assert energies == sorted(energies)
    assert response.data["count_below_S"] >= 1


def test_green_norms():
    response = diagnostic_registry.execute("green", n=1, d=1, L=8, M=2, E=-1.0, x=[0])
    assert response.success
    assert response.rows
    assert all(row["norm"] > 0 for row in response.rows)


def test_cheeger_gap():
    response = diagnostic_registry.execute("cheeger", l=[2, 3], d=[1])
    assert response.success
    assert response.passed


def test_kronecker_oracle():
    response = diagnostic_registry.execute("kronecker", n=2, d=1, L=2, M=2, trials=2, count=5)
    assert response.success
    assert response.passed
    assert response.data["max_relative_error"] <= 1e-9


def test_neumann_order():
    response = diagnostic_registry.execute("neumann", L=5, meshes=[8, 16, 32])
    assert response.success
    assert response.passed
    assert response.data["mean_order"] == pytest.approx(2.0, abs=0.3)
    assert 1.7 <= response.data["min_order"] <= response.data["max_order"] <= 2.3


def test_neumann_fails_on_one_bad_order(mocker):
    """A single k outside the band fails the check even when the mean is fine."""
    orders = [2.0, 2.0, 2.0, 1.2, 2.8]
    errors = {M: [1.0] * 5 for M in (8, 16, 32)}
    fake = NeumannConvergence(5, [8, 16, 32], errors, orders, sum(orders) / 5)
    mocker.patch("src.diagnostics.checks.neumann_convergence", return_value=fake)
    response = diagnostic_registry.execute("neumann")
    assert response.success
    assert response.data["mean_order"] == pytest.approx(2.0)
    assert response.data["min_order"] == 1.2
    assert not response.passed


def test_weyl_count():
    response = diagnostic_registry.execute("weyl", n=2, d=1, L=2, M=2, trials=2)
    assert response.success
    assert response.data["constant"] == 2
    assert len(response.rows) == 2


def test_assertable_failure_is_not_an_error(mocker):
    diagnostic = diagnostic_registry.get("cheeger")
    mocker.patch.object(diagnostic, "execute", return_value=diagnostic._handle_success({}, passed=False))
    response = diagnostic_registry.execute("cheeger")
    assert response.success
    assert response.failed_assertion
