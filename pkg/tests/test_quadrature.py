import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as si

from dartreason.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gk15, integrate, pairwise_sum


def test_rule_weights_sum_to_two():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.all(np.diff(NODES) > 0)


@pytest.mark.parametrize("deg", range(0, 23, 2))
def test_kronrod_exact_on_polynomials(deg):
    k, _ = gk15(lambda x: x**deg, [-1.0], [1.0])
    assert k[0] == pytest.approx(2.0 / (deg + 1), rel=1e-14)


def test_gauss_part_exact_to_degree_13():
    _, err = gk15(lambda x: x**12 + x**13, [-1.0], [1.0])
    assert err[0] < 1e-14


def test_adaptive_matches_scipy_on_smooth_integrand():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    res = integrate(f, [-4, 4], abs_tol=1e-12)
    ref, _ = si.quad(f, -4, 4, epsabs=1e-13)
    assert res.converged
    assert res.value == pytest.approx(ref, abs=1e-11)


def test_breakpoints_make_steps_exact():
    f = lambda x: np.where(x < 0.3, 1.0, 2.0)
    res = integrate(f, [0.0, 0.3, 1.0], abs_tol=1e-14)
    assert res.value == pytest.approx(0.3 + 1.4, abs=1e-14)
    assert res.n_evals == 30


def test_budget_exhaustion_is_reported():
    res = integrate(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), [0.0, 1.0],
                    abs_tol=1e-14, max_evals=2000)
    assert not res.converged
    assert res.n_evals <= 2000 + 30 * 15 * 2


def test_endpoint_singularity():
    res = integrate(lambda x: 1.0 / np.sqrt(x), [0.0, 1.0], abs_tol=1e-8, max_evals=200_000)
    assert res.value == pytest.approx(2.0, abs=1e-6)


@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-3, 3))
def test_linear_integrand_any_interval(a, w, c):
    b = a + w
    res = integrate(lambda x: c * x + 1.0, [a, b])
    assert res.value == pytest.approx(c * (b * b - a * a) / 2 + w, abs=1e-9)


def test_pairwise_sum_is_order_fixed():
    v = np.random.default_rng(0).normal(size=1001)
    assert pairwise_sum(v) == pytest.approx(math.fsum(v), abs=1e-12)
    assert pairwise_sum([]) == 0.0
