import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from regionprune import _kernels
from regionprune._kernels import fallback

compiled = pytest.mark.skipif(_kernels.BACKEND != "cython", reason="compiled kernel not built")


def lp_cases(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m, n = int(rng.integers(1, 40)), int(rng.integers(2, 9))
        G = rng.uniform(-300, 300, (m, n))
        if rng.random() < 0.3:
            G = np.round(G / 100)  # integer data: heavy degeneracy and ties
        yield G


def test_fallback_matches_highs():
    for G in lp_cases(1, 150):
        status, d, b = fallback.max_slack(G, np.ones(len(G)))
        assert status == fallback.OPTIMAL
        assert d == pytest.approx(oracles.max_slack(G), abs=1e-7)
        assert b.sum() == pytest.approx(1.0, abs=1e-9)
        # the witness attains the optimum
        assert (G @ b).min() == pytest.approx(d, abs=1e-7)


@compiled
def test_backends_identical():
    for G in lp_cases(2, 400):
        coupled = (np.random.default_rng(len(G)).random(len(G)) < 0.8).astype(float)
        a = _kernels.max_slack(G, coupled)
        b = fallback.max_slack(G, coupled)
        assert a[0] == b[0]
        assert a[1] == b[1]
        assert np.array_equal(a[2], b[2])


def test_plain_rows_infeasible():
    # the plain row asks for -2 b0 - b1 >= 0, impossible on the simplex
    G = np.array([[1.0, -1.0], [-2.0, -1.0]])
    status, _, _ = _kernels.max_slack(G, np.array([1.0, 0.0]))
    assert status == _kernels.INFEASIBLE


def test_no_coupled_rows_rejected():
    with pytest.raises(ValueError):
        _kernels.max_slack(np.array([[1.0, -1.0]]), np.zeros(1))


def test_near_duplicate_rows():
    # dominance LPs against vectors that agree to 1e-9 give nearly parallel
    # columns, which stress the pivot choice
    rng = np.random.default_rng(5)
    for _ in range(60):
        m, n = int(rng.integers(20, 300)), int(rng.integers(3, 12))
        U = rng.uniform(-100, 100, (m, n))
        U[m // 2 :] = U[: m - m // 2] + rng.normal(0, 1e-9, (m - m // 2, n))
        G = U[0] - U[1:]
        status, d, b = _kernels.max_slack(G, np.ones(len(G)))
        assert status == _kernels.OPTIMAL
        assert d == pytest.approx(oracles.max_slack(G), abs=1e-7)
        assert (G @ b).min() == pytest.approx(d, abs=1e-7)


def test_vertex_optimum():
    status, d, b = _kernels.max_slack(np.array([[1.0, -1.0]]), np.ones(1))
    assert status == _kernels.OPTIMAL
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(b, [1.0, 0.0], atol=1e-12)


def test_read_only_input_accepted():
    G = np.array([[1.0, -1.0], [0.5, 0.2]])
    G.setflags(write=False)
    assert _kernels.max_slack(G, np.ones(2))[0] == _kernels.OPTIMAL


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(2, 5)), elements=st.floats(-50, 50, width=32)))
def test_max_slack_property(G):
    status, d, b = _kernels.max_slack(G, np.ones(len(G)))
    assert status == _kernels.OPTIMAL
    assert d == pytest.approx(oracles.max_slack(G), abs=1e-6)
