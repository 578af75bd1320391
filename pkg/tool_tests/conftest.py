"""
Shared fixtures for the qgraph-loc test suite.
"""

import sys
from pathlib import Path

import pytest

# Add the repository root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.config.settings import settings
from src.fem.assembly import OperatorFactory
from src.models.disorder import InteractionSpec, Mesh, PotentialLaw
from src.models.geometry import BoxSpec


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Trials run in-process."""
    monkeypatch.setattr(settings, "threads", 1)


@pytest.fixture
def uniform_law():
    return PotentialLaw(kind="uniform", q_minus=0.0, q_plus=1.0)


@pytest.fixture
def factory(uniform_law):
    """Two-particle capable factory on a coarse mesh."""
    return OperatorFactory(uniform_law, InteractionSpec(u0=1.0, r0=1), Mesh(M=2), seed=7)


@pytest.fixture
def interval_box():
    """One particle on Λ_2(0) ⊂ ℤ."""
    return BoxSpec.cube(((0,),), 2)
