"""
Tests for the scale schedule, mass recursion and feasibility constraints.
"""

from fractions import Fraction

import pytest

from src.msa.scheduler import (
    build_schedule, ds_target, ils_constraint_check, ils_threshold, initial_mass, limit_mass,
    min_feasible_p1, next_scale, p_sequence, radii_consistent, scale_sequence, scheduled_radii,
)
from src.utils.errors import FeasibilityError, PreconditionError


def test_next_scale_is_exact():
    assert next_scale(1000) == 31623
    assert scale_sequence(1000, 2) == [1000, 31623, next_scale(31623)]


def test_initial_mass():
    assert float(initial_mass(81)) == pytest.approx(1 / 9, rel=1e-15)


def test_p_recursion():
    ps = p_sequence(2, 1, 2000)
    assert ps[0] == Fraction(2000)
    assert float(ps[1]) == pytest.approx(884.67, abs=0.01)
    with pytest.raises(PreconditionError):
        p_sequence(2, 1, 0)


def test_min_feasible_p1():
    assert min_feasible_p1(1, 1) == 4
    p1 = min_feasible_p1(2, 1)
    assert p_sequence(2, 1, p1)[-1] >= 7
    assert p_sequence(2, 1, p1 - 1)[-1] < 7


def test_infeasible_exponent_raises():
    with pytest.raises(FeasibilityError) as exc:
        build_schedule(2, 1, 5, 1000, 1)
    assert "p_N" in str(exc.value)


def test_mass_checks_are_reported():
    """Small L0 breaks the mass floor; the schedule still builds unless strict."""
    schedule = build_schedule(2, 1, "2000", 1000, 2)
    assert schedule.L == (1000, 31623, next_scale(31623))
    assert not schedule.feasible
    assert all(check.passed for check in schedule.checks if check.name.startswith("p_N"))
    with pytest.raises(FeasibilityError):
        build_schedule(2, 1, "2000", 1000, 2, strict=True)


def test_masses_decrease_at_large_scale():
    schedule = build_schedule(2, 1, "auto", 10 ** 12, 2)
    masses = schedule.masses
    assert all(m > 0 for m in masses)
    assert masses[0] > masses[1] > masses[2]
    assert all(check.passed for check in schedule.checks if check.name == "m strictly decreasing")


def test_limit_mass_keeps_half():
    schedule = build_schedule(1, 1, 4, 10 ** 12, 1)
    assert schedule.feasible
    limit = limit_mass(schedule)
    assert limit.positive
    assert limit.largeness_holds
    assert limit.half_mass_holds
    assert limit.value <= limit.initial


def test_auto_p1_schedule():
    schedule = build_schedule(2, 1, "auto", 1000, 0)
    assert schedule.p1 == min_feasible_p1(2, 1)
    assert schedule.K == 0


def test_schedule_preconditions():
    with pytest.raises(PreconditionError):
        build_schedule(1, 1, 4, 1, 0)
    with pytest.raises(PreconditionError):
        build_schedule(1, 1, 4, 100, -1)


def test_ds_target():
    schedule = build_schedule(1, 1, 4, 20, 0)
    assert ds_target(schedule, 1, 0) == pytest.approx(20.0 ** -8, rel=1e-9)
    assert ds_target(schedule, 1, 0) == pytest.approx(3.9e-11, rel=0.01)


def test_radii_follow_the_separation_radius():
    schedule = build_schedule(2, 1, 2000, 1000, 1)
    assert scheduled_radii(schedule, 1) == [4 * (2 * 1000 + 1) + 2000, 4 * (2 * 31623 + 1) + 2 * 31623]
    assert radii_consistent(schedule, 1)


def test_ils_threshold_holds_beyond():
    threshold = ils_threshold(1, 1, 0.5, 1.0, 1.0, 1.0)
    assert threshold is not None
    assert ils_constraint_check(threshold, 1, 1, 0.5, 1.0, 1.0, 1.0)
    assert ils_constraint_check(10 * threshold, 1, 1, 0.5, 1.0, 1.0, 1.0)
    assert ils_threshold(1, 1, 0.5, 1.0, 1.0, 0.0) is None


def test_ils_constraint_preconditions():
    with pytest.raises(PreconditionError):
        ils_constraint_check(100, 1, 1, 1.5, 1.0, 1.0, 1.0)
