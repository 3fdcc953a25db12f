import json
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wamin import WeightedAutomaton
from wamin.complexity import HypercubeInstance, hypercube_to_pa, pa_from_witness

DATA = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PLANE_POINTS = [(0, 0), (0, F(3, 4)), (F(1, 4), F(1, 2)), (F(1, 2), F(1, 4)), (F(1, 2), F(3, 4))]
PLANE_Q = [(0, 0), (0, 1), (1, F(1, 2))]


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def plane_instance():
    return HypercubeInstance(2, PLANE_POINTS, 3)


@pytest.fixture(scope="session")
def plane_pa(plane_instance):
    return hypercube_to_pa(plane_instance)[0].automaton


@pytest.fixture(scope="session")
def plane_witness_pa(plane_instance):
    return pa_from_witness(plane_instance, PLANE_Q).automaton


def scalar_wa(m, alpha=1, eta=1, letter="a"):
    """One-state WA with M(letter) = m."""
    return WeightedAutomaton((letter,), {letter: np.array([[F(m)]], dtype=object)},
                             np.array([F(alpha)], dtype=object), np.array([F(eta)], dtype=object))


def exact(rows):
    return np.array([[F(v) for v in r] for r in rows], dtype=object)


def exact_vec(v):
    return np.array([F(x) for x in v], dtype=object)
