"""
Tests for the single-sample multi-scale predicates: NS, NR/CNR, goodness and NT/HNR.
"""

import numpy as np
import pytest

from src.diagnostics.msa_predicates import check_good, check_NR_CNR, check_NT_HNR, classify_NS
from src.geometry.lattice import sub_cubes
from src.geometry.separability import separability
from src.models.geometry import BoxSpec
from src.spectral.engine import lowest_eigs
from src.utils.errors import GeometryError

SEVEN = BoxSpec.cube(((0,),), 7)


def test_non_singularity_is_monotone_in_mass(factory):
    """A larger mass only shrinks the threshold e^{−mL}."""
    op = factory(SEVEN)
    masses = [0.001, 0.05, 0.2, 0.5, 1.0, 5.0]
    reports = [classify_NS(op, SEVEN, -2.0, m) for m in masses]
    norms = {r.witnesses["max_norm"] for r in reports}
    assert len(norms) == 1
    flags = [r.ns for r in reports]
    assert flags[0] and not flags[-1]
    assert flags == sorted(flags, reverse=True)


def test_singular_witness_is_consistent(factory):
    report = classify_NS(factory(SEVEN), SEVEN, -2.0, 5.0)
    assert not report.ns
    assert report.witnesses["max_norm"] > report.witnesses["threshold"]
    assert report.witnesses["max_norm"] <= report.witnesses["resolvent_bound"]
    assert max(abs(c) for c in report.witnesses["y"]) >= 1


def test_energy_below_spectrum_is_non_resonant(factory):
    cube = BoxSpec.cube(((0,),), 8)
    report = check_NR_CNR(factory, cube, -5.0)
    assert report.nr and report.cnr
    assert not report.cnr_sampled
    assert report.witnesses["distance"] >= 5.0
    assert report.witnesses["tested"] == 25


def test_eigenvalue_is_resonant(factory):
    cube = BoxSpec.cube(((0,),), 8)
    E = float(lowest_eigs(factory(cube), 1).eigenvalues[0])
    report = check_NR_CNR(factory, cube, E)
    assert not report.nr
    assert not report.cnr


@pytest.mark.parametrize("E", np.linspace(-1.0, 3.0, 9))
def test_complete_non_resonance_implies_non_resonance(factory, E):
    report = check_NR_CNR(factory, BoxSpec.cube(((0,),), 8), float(E))
    assert report.nr or not report.cnr


@pytest.mark.parametrize("m", [0.001, 5.0])
def test_good_counts_singular_sub_cubes(factory, m):
    """The singular count matches NS on each ℓ-sub-cube."""
    cube = BoxSpec.cube(((0,),), 9)
    expected = sum(1 for box in sub_cubes(cube, 7) if not classify_NS(factory(box), box, -2.0, m).ns)
    report = check_good(factory, cube, -2.0, m, 7, J=1)
    assert report.witnesses["singular"] == expected
    assert report.witnesses["tested"] == 5
    # overlapping 7-cubes of a 9-cube are never separable
    assert report.good
    assert len(report.witnesses["separable_family"]) == min(expected, 1)
    strict = check_good(factory, cube, -2.0, m, 7, J=0)
    assert strict.good == (expected == 0)


def test_separable_singular_sub_cubes_break_goodness(factory):
    cube = BoxSpec.cube(((0,),), 16)
    report = check_good(factory, cube, -2.0, 5.0, 7, J=1)
    assert report.witnesses["singular"] == report.witnesses["tested"] == 19
    family = report.witnesses["separable_family"]
    assert len(family) == 2
    assert not report.good
    first, second = (tuple(tuple(p) for p in box["center"]) for box in family)
    assert separability(first, second, 7, 1).separable
    assert check_good(factory, cube, -2.0, 5.0, 7, J=2).good


def test_good_needs_sub_cube_side_seven(factory):
    with pytest.raises(GeometryError):
        check_good(factory, BoxSpec.cube(((0,),), 8), 0.5, 1.0, 6)


def test_non_tunneling_rejects_fully_interactive_cube(factory):
    with pytest.raises(GeometryError):
        check_NT_HNR(factory, BoxSpec.cube(((0,), (0,)), 2), 0.5, 0.1, 7, q_minus=0.0)


def test_non_tunneling_is_vacuous_below_ell(factory):
    report = check_NT_HNR(factory, BoxSpec.cube(((0,), (10,)), 2), 2.0, 0.1, 7, q_minus=0.0)
    assert report.nt
    assert report.witnesses["nt_vacuous"]
    assert "tunneling" not in report.witnesses
    assert report.witnesses["checked"] > 0


def test_non_tunneling_below_cutoff_is_auto_good(factory):
    report = check_NT_HNR(factory, BoxSpec.cube(((0,), (40,)), 7), -1.0, 0.1, 7, q_minus=0.0)
    assert report.nt and report.hnr
    assert report.witnesses["nt_vacuous"] is False
    assert report.witnesses["checked"] == 0
    assert report.witnesses["auto_good"] > 0
