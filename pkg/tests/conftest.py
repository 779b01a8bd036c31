from pathlib import Path

import numpy as np
import pytest

from regionprune.bench import gen_random_vector_set, make_rng
from regionprune.geometry import VectorSet

FIXTURES = Path(__file__).parent / "fixtures"

# two states, two actions, two observations; rows sum to one exactly
SMALL_T = np.array([[[0.8, 0.2], [0.19, 0.81]], [[0.98, 0.02], [0.48, 0.52]]])
SMALL_O = np.array([[[0.42, 0.58], [0.17, 0.83]], [[0.29, 0.71], [0.45, 0.55]]])
SMALL_R = np.array([[4.5, -0.4], [1.6, 2.9]])
SMALL_BETA = 0.9


def tangent_set(rng, n):
    """n lines tangent to a random parabola over p = b(s0): minimal by
    construction, each line is the unique maximizer at its point of contact."""
    while True:
        p = np.sort(rng.uniform(0.02, 0.98, n))
        if n == 1 or np.diff(p).min() > 0.02:
            break
    a, c, lift = rng.uniform(50, 150), rng.uniform(0, 1), rng.uniform(-50, 50)
    f = a * (p - c) ** 2 + lift
    df = 2 * a * (p - c)
    # value at belief (q, 1 - q) is q * v0 + (1 - q) * v1
    return VectorSet(np.column_stack([f + df * (1 - p), f - df * p]))


def random_sets(rng, k, n, states):
    """Random minimal sets. Two-state sets use tangent lines: uniform draws
    almost never put more than five lines on a two-state envelope."""
    if states == 2:
        return [tangent_set(rng, n) for _ in range(k)]
    return [gen_random_vector_set(states, n, rng) for _ in range(k)]


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return make_rng(20240601)


@pytest.fixture
def small_model():
    from regionprune.dp import PomdpModel

    return PomdpModel(SMALL_T, SMALL_O, SMALL_R, SMALL_BETA)
