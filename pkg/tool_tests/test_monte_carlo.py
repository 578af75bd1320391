"""
Tests for Monte Carlo estimators: counting statistics, determinism and trends.
"""

import math

import pytest

from src.diagnostics.monte_carlo import (
    energy_grid, ils_mass, lifshitz_threshold, lifshitz_trend, mc_ds, mc_ils, mc_lifshitz, mc_wegner_one,
    mc_wegner_two, projection_volume,
)
from src.fem.assembly import OperatorFactory
from src.geometry.separability import separated_pair
from src.models.disorder import Mesh, PotentialLaw
from src.models.geometry import BoxSpec
from src.models.reports import McEstimate, rule_of_three, wilson_interval
from src.msa.scheduler import build_schedule
from src.utils.errors import PreconditionError


def test_wilson_interval_contains_estimate():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_empty_cell_uses_rule_of_three():
    est = McEstimate.from_counts(0, 100, seed=1)
    assert est.upper_bound == pytest.approx(0.03)
    assert rule_of_three(100) == pytest.approx(0.03)
    assert est.neg_log == pytest.approx(-math.log(0.03))


def test_inconsistent_counts_rejected():
    with pytest.raises(ValueError):
        McEstimate(trials=10, successes=11, p_hat=0.5, wilson_95=(0.0, 1.0), seed=0, upper_bound=1.0)


def test_lifshitz_trend_rules():
    est = [McEstimate.from_counts(k, 100, seed=0) for k in (50, 10, 0)]
    assert lifshitz_trend(est)
    broken = [McEstimate.from_counts(k, 100, seed=0) for k in (50, 0, 10)]
    assert not lifshitz_trend(broken)
    flat = [McEstimate.from_counts(k, 100, seed=0) for k in (20, 20)]
    assert not lifshitz_trend(flat)


def test_lifshitz_threshold():
    assert lifshitz_threshold(2, 0.0, 0.5, 4) == pytest.approx(0.0625)
    assert lifshitz_threshold(1, 1.0, 0.5, 60) == pytest.approx(1.0 + 0.5 / 3600)


def test_projection_volume():
    assert projection_volume(BoxSpec.cube(((0,), (10,)), 2)) == 8
    assert projection_volume(BoxSpec.cube(((0,), (1,)), 2)) == 5
    assert projection_volume(BoxSpec.cube(((0, 0), (9, 9)), 1)) == 8


def test_ils_mass():
    assert ils_mass(81) == pytest.approx(1 / 9)


def test_wegner_one_is_deterministic(factory, interval_box):
    first = mc_wegner_one(factory, interval_box, 0.5, 0.05, trials=12, seed=3, workers=1)
    second = mc_wegner_one(factory, interval_box, 0.5, 0.05, trials=12, seed=3, workers=1)
    assert first.estimate == second.estimate
    assert [r["distance"] for r in first.rows] == [r["distance"] for r in second.rows]
    assert first.volume_factor == 4 * 4
    with pytest.raises(PreconditionError):
        mc_wegner_one(factory, interval_box, 0.5, 0.0, trials=2, seed=3, workers=1)


def test_wegner_one_ignores_worker_count(factory, interval_box):
    """Trials split over worker processes give the same counts as an in-process run."""
    serial = mc_wegner_one(factory, interval_box, 0.5, 0.05, trials=40, seed=3, workers=1)
    pooled = mc_wegner_one(factory, interval_box, 0.5, 0.05, trials=40, seed=3, workers=2)
    assert pooled.estimate.successes == serial.estimate.successes
    assert pooled.estimate == serial.estimate
    assert [r["distance"] for r in pooled.rows] == [r["distance"] for r in serial.rows]


def test_wegner_two_matches_independent_oracle(factory):
    """Separated cubes share no edge, so the joint and independent streams agree in law."""
    first, second = separated_pair(1, 1, 2, 1)
    report = mc_wegner_two(factory, first, second, (0.0, 2.0), 0.05, trials=8, seed=2, workers=1)
    assert report.estimate.trials == report.oracle.trials == 8
    assert len(report.rows) == 8


def test_wegner_two_rejects_overlapping_cubes(factory):
    box = BoxSpec.cube(((0,),), 2)
    with pytest.raises(PreconditionError):
        mc_wegner_two(factory, box, BoxSpec.cube(((1,),), 2), (0.0, 1.0), 0.05, trials=2, seed=0, workers=1)


def test_ds_requires_holder_law():
    factory = OperatorFactory(PotentialLaw(kind="point_mass"), None, Mesh(M=2), seed=0)
    schedule = build_schedule(1, 1, 4, 20, 0)
    with pytest.raises(PreconditionError):
        mc_ds(factory, 1, 0, schedule, trials=2, seed=0)


def test_energy_grid_resolves_the_singular_scale():
    schedule = build_schedule(1, 1, 4, 20, 0)
    L, beta = schedule.L[0], float(schedule.beta)
    lo, hi = schedule.interval(1)
    grid = energy_grid(lo, hi, L, beta, 8)
    assert grid[0] == pytest.approx(lo)
    assert grid[-1] == pytest.approx(hi)
    assert grid[1] - grid[0] <= math.exp(-L ** beta) / 4
    assert len(grid) > 8


def test_energy_grid_bounds():
    assert len(energy_grid(0.0, 1e-6, 1, 0.5, 8)) == 8
    with pytest.raises(PreconditionError):
        energy_grid(0.0, 1.0, 10 ** 4, 0.5)


@pytest.mark.slow
def test_ds_scan_spacing_is_recorded(factory):
    schedule = build_schedule(1, 1, 4, 20, 0)
    report = mc_ds(factory, 1, 0, schedule, trials=1, seed=0, workers=1)
    L, beta = schedule.L[0], float(schedule.beta)
    assert report.L == L
    assert report.spacing <= math.exp(-L ** beta) / 4
    lo, hi = schedule.interval(1)
    assert report.spacing == pytest.approx((hi - lo) / (report.grid_points - 1))
    assert report.estimate.trials == 1


@pytest.mark.slow
def test_lifshitz_probabilities_shrink_with_size(uniform_law):
    factory = OperatorFactory(uniform_law, None, Mesh(M=2), seed=0)
    report = mc_lifshitz(factory, [1, 2], b=0.5, trials=200, seed=4, workers=1)
    assert report.n_l == [2, 4]
    first, second = report.estimates
    assert second.successes <= first.successes + 5


@pytest.mark.slow
def test_ils_gap_event(factory):
    box = BoxSpec.cube(((0,),), 4)
    report = mc_ils(factory, box, trials=50, seed=1, workers=1)
    assert report.L0 == 4
    assert report.mass == pytest.approx(ils_mass(4))
    assert report.ns_scan is None
    assert 0 <= report.gap.successes <= 50
