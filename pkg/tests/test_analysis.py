import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dartreason import analysis as A
from dartreason import darts as D
from dartreason import payoffs as P
from dartreason.expectation import EvalSpec, expect
from dartreason.optimizer import g_curve


# -- |phi| scans ---------------------------------------------------------------

@pytest.mark.parametrize("dart,monotone", [
    (D.Normal1D(), True), (D.Cauchy1D(), True), (D.TentCF1D(), True),
    (D.bern(0.5), False), (D.SemiCircle1D(), False), (D.Uniform1D(0, 1), False),
    (D.Arcsine1D(), False), (D.UniformDisc2D(), False),
])
def test_cf_scan_verdicts(dart, monotone):
    rep = A.cf_scan(dart, 4 * math.pi, 4000)
    assert rep.monotone == monotone
    assert (rep.first_violation is None) == monotone


@given(st.floats(0.05, 0.95), st.floats(1.0, 5.0), st.floats(-3, 3))
@settings(max_examples=50)
def test_two_atom_darts_are_not_monotone(p, gap, x0):
    dart = D.Atomic((x0, x0 + gap), (1 - p, p))
    assert not A.cf_scan(dart, 4 * math.pi, 4000).monotone


@pytest.mark.parametrize("dart", [
    D.IndepSum(((1.0, D.Normal1D()), (1.0, D.Cauchy1D()))),
    D.IndepSum(((1.0, D.Normal1D()), (0.5, D.TentCF1D()))),
    D.Mixture(((0.3, D.Normal1D(0, 1)), (0.7, D.Normal1D(0, 2)))),
    D.Mixture(((0.7, D.Normal1D(0, 1)), (0.3, D.Normal1D(0, 2)))),
], ids=["normal+cauchy", "normal+tent", "mix0.3", "mix0.7"])
def test_closure_examples_are_monotone_and_match_cos_curve(dart):
    rep = A.cf_scan(dart, 4 * math.pi, 400)
    assert rep.monotone
    c = g_curve(dart, P.Cosine(), rep.t_grid[1:])
    assert c.increases == []
    assert np.max(np.abs(c.g - rep.abs_phi[1:])) <= 1e-9


def test_cf_scan_errors():
    with pytest.raises(ValueError):
        A.cf_scan(D.Normal1D(), 1.0, 1)
    with pytest.raises(ValueError):
        A.cf_scan(D.Normal1D(), 0.0, 10)


# -- Bernoulli + normal criterion ------------------------------------------------

def brute_cos_g(p, sigma, ds):
    dart = D.IndepSum(((1.0, D.bern(p)), (sigma, D.Normal1D())))
    return np.abs(dart.cf(np.asarray(ds)))


@pytest.mark.parametrize("sigma", [0.1, 1.0, 10.0])
def test_half_is_never_reasonable(sigma):
    r = A.bern_normal_criterion(A.BernNormalParams(0.5, sigma))
    assert not r.reasonable_cos
    assert r.conclusive


def test_criterion_examples():
    assert A.bern_normal_criterion(A.BernNormalParams(0.3, math.sqrt(0.4178))).reasonable_cos
    r = A.bern_normal_criterion(A.BernNormalParams(0.3, 0.05))
    assert not r.reasonable_cos and r.min_value < 0


@given(st.floats(0.05, 0.95).filter(lambda p: abs(p - 0.5) > 0.02), st.floats(0.05, 2.0))
@settings(max_examples=30)
def test_criterion_agrees_with_cf_scan(p, sigma):
    r = A.bern_normal_criterion(A.BernNormalParams(p, sigma))
    d = np.linspace(0.0, max(r.d_scanned, 4 * math.pi), 200_001)
    g = brute_cos_g(p, sigma, d)
    rises = np.max(np.diff(g) / np.maximum(g[1:], 1e-300))
    if r.reasonable_cos:
        assert rises <= 1e-9
    else:
        # The criterion value is the log-derivative numerator; a negative
        # minimum well above rounding shows up as a visible rise.
        if r.min_value < -1e-8:
            assert rises > 0


def test_phase_boundary():
    sp = A.phase_boundary_sigma(0.3, tol=1e-6)
    assert sp**2 <= A.sufficient_sigma2(0.3) * 1.01
    assert sp**2 <= 0.4178 + 1e-3
    assert A.bern_normal_criterion(A.BernNormalParams(0.3, sp + 1e-3)).reasonable_cos
    assert not A.bern_normal_criterion(A.BernNormalParams(0.3, sp - 1e-3)).reasonable_cos
    with pytest.raises(ValueError):
        A.phase_boundary_sigma(0.5)


@given(st.floats(0.1, 0.9).filter(lambda p: abs(p - 0.5) > 0.05), st.floats(0.1, 1.5), st.floats(1.01, 3.0))
@settings(max_examples=25)
def test_criterion_monotone_in_sigma(p, sigma, factor):
    lo = A.bern_normal_criterion(A.BernNormalParams(p, sigma)).reasonable_cos
    hi = A.bern_normal_criterion(A.BernNormalParams(p, sigma * factor)).reasonable_cos
    assert hi or not lo


def test_criterion_validation():
    for bad in ((0.0, 1.0), (1.0, 1.0), (0.3, 0.0)):
        with pytest.raises(ValueError):
            A.BernNormalParams(*bad)
    with pytest.raises(ValueError):
        A.bern_normal_criterion(A.BernNormalParams(0.3, 1.0), d_max=1.0)


def test_cutoff_bound():
    prm = A.BernNormalParams(0.2, 0.3)
    cut = A.criterion_cutoff(prm)
    d = np.linspace(cut, cut + 50, 10_001)
    assert np.all(A.criterion_value(prm, d) >= 0)
    assert math.isinf(A.criterion_cutoff(A.BernNormalParams(0.5, 1.0)))


# -- divisibility ----------------------------------------------------------------

@pytest.mark.parametrize("dart", [D.Normal1D(), D.Cauchy1D()], ids=repr)
@pytest.mark.parametrize("d", [1.1, 1.5, 2.0, 3.0])
def test_selfdecomposable_divide(dart, d):
    assert A.divisibility_check(dart, d).valid


def test_uniform_divides_only_at_integers():
    u = D.Uniform1D(0.0, 1.0)
    assert A.divisibility_check(u, 2.0).valid
    assert A.divisibility_check(u, 3.0).valid
    assert not A.divisibility_check(u, 1.5).valid


def test_two_atom_dart_never_divides():
    assert not A.divisibility_check(D.bern(0.3), 2.0).valid


def test_divisibility_validation():
    with pytest.raises(ValueError):
        A.divisibility_check(D.Normal1D(), 1.0)
    with pytest.raises(ValueError):
        A.divisibility_check(D.UniformDisc2D(), 2.0)


# -- Cesaro energy ------------------------------------------------------------------

def test_cesaro_energy_decays_for_absolutely_continuous():
    e = [A.cesaro_energy(D.Normal1D(), T) for T in (10.0, 100.0)]
    assert e[1] < e[0] / 5
    assert A.cesaro_energy(D.Normal1D(), 100.0) == pytest.approx(math.sqrt(math.pi) / 2 / 100, rel=1e-6)


def test_cesaro_energy_atoms_tend_to_sum_of_squares():
    b = D.bern(0.3)
    assert A.cesaro_energy(b, 2000.0) == pytest.approx(0.09 + 0.49, abs=1e-3)


def test_cesaro_energy_cantor_decays_slowly():
    e = [A.cesaro_energy(D.Cantor1D(), T) for T in (10.0, 30.0, 90.0)]
    assert all(b < a for a, b in zip(e, e[1:]))
    assert all(a / b < 2.0 for a, b in zip(e, e[1:]))


# -- zeros ------------------------------------------------------------------------------

def test_bessel_zeros():
    z = A.zeros(lambda x: A.bessel_j(0, x), x_max=12.0)
    assert z == pytest.approx([2.404825557695773, 5.520078110286311, 8.653727912911013,
                               11.79153443901428], abs=1e-9)
    zj = A.zeros(A.jinc, x_max=8.0)
    assert zj == pytest.approx([3.8317059702075125, 7.015586669815619], abs=1e-9)


def test_zero_construct_equality_on_attainable_range():
    # h agrees with f(x) = exp(cx) cos(omega x) on |x| <= |a0| + B, and the
    # atoms of Bern(0.3) land at a and a + 1, so equality holds for
    # a in [-B, B - 1].
    dart = D.bern(0.3)
    h = P.make_zero_construct(dart)
    for a in np.linspace(-h.B, h.B - 1, 21):
        assert abs(expect(dart, h, a, 1.0).value) < 1e-12 * max(1.0, math.exp(h.c * abs(a) + h.c))
