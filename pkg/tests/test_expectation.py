import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from dartreason import darts as D
from dartreason import payoffs as P
from dartreason.darts import UnsupportedOperation
from dartreason.expectation import EvalSpec, atom_table, expect, expect_cos_closed, polar_grid


def erf_series(x, terms=120):
    """erf without any library erf: Maclaurin series near zero, the erfc
    continued fraction in the tails."""
    if abs(x) > 2.5:
        # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        y = abs(x)
        frac = y
        for k in range(terms, 0, -1):
            frac = y + (k / 2) / frac
        tail = math.exp(-y * y) / math.sqrt(math.pi) / frac
        return math.copysign(1.0 - tail, x)
    total, term = 0.0, x
    for n in range(terms):
        total += term / (2 * n + 1)
        term *= -x * x / (n + 1)
    return 2.0 / math.sqrt(math.pi) * total


def test_erf_series_oracle_is_sound():
    for x in (-4.0, -1.0, 0.0, 0.3, 2.4, 2.6, 7.0):
        assert erf_series(x) == pytest.approx(math.erf(x), abs=1e-14)


def normal_interval_prob(lo, hi):
    return 0.5 * (erf_series(hi / math.sqrt(2)) - erf_series(lo / math.sqrt(2)))


@pytest.mark.parametrize("a", [0.0, 0.3, 1.7])
@pytest.mark.parametrize("d", [0.5, 1.0, 2.5])
def test_normal_squarewave_against_erf_series(a, d):
    # P(a + dZ in [2k, 2k+1]) summed over k.
    oracle = sum(normal_interval_prob((2 * k - a) / d, (2 * k + 1 - a) / d) for k in range(-12, 13))
    r = expect(D.Normal1D(), P.SquareWave(), a, d, EvalSpec(abs_tol=1e-9))
    assert r.value == pytest.approx(oracle, abs=1e-8)
    assert r.err_est <= 1e-8


@pytest.mark.parametrize("dart,pdf,lo,hi", [
    (D.Uniform1D(0.0, 2.0), lambda x: 0.5, 0.0, 2.0),
    (D.SemiCircle1D(), lambda x: 2 / math.pi * math.sqrt(max(1 - x * x, 0)), -1.0, 1.0),
    (D.Cauchy1D(0.0, 1.0), lambda x: 1 / (math.pi * (1 + x * x)), -math.inf, math.inf),
    (D.Normal1D(0.2, 0.7), stats.norm(0.2, 0.7).pdf, -math.inf, math.inf),
], ids=["uniform", "semicircle", "cauchy", "normal"])
@pytest.mark.parametrize("payoff", [P.KDelta(0.1, 0.5), P.GaussBump((0.4,), 0.3), P.BoardSlice()],
                         ids=["kdelta", "bump", "boardslice"])
def test_quad_against_scipy(dart, pdf, lo, hi, payoff):
    a, d = 0.35, 1.3 if not isinstance(payoff, P.BoardSlice) else 60.0
    pts = sorted({float(k) for k in payoff.knots(a + d * max(lo, -400), a + d * min(hi, 400))})
    brk = [(x - a) / d for x in pts if (lo < (x - a) / d < hi)]
    oracle, _ = integrate.quad(lambda x: payoff(a + d * x) * pdf(x), lo, hi, points=brk or None,
                               limit=2000, epsabs=1e-11) if math.isinf(lo) is False else (None, None)
    if oracle is None:
        # scipy refuses breakpoints on infinite ranges; split at the knots.
        edges = [-math.inf] + brk + [math.inf]
        oracle = sum(integrate.quad(lambda x: payoff(a + d * x) * pdf(x), u, v, limit=2000,
                                    epsabs=1e-11)[0] for u, v in zip(edges, edges[1:]))
    r = expect(dart, payoff, a, d, EvalSpec(abs_tol=1e-7))
    assert r.value == pytest.approx(oracle, abs=1e-6)


def test_disc_against_scipy():
    f = P.GaussBump((0.3, -0.2), 0.4)
    oracle, _ = integrate.dblquad(lambda r, th: f(np.array([r * math.cos(th), r * math.sin(th)])) * r / math.pi,
                                  0, 2 * math.pi, 0, 1, epsabs=1e-10)
    r = expect(D.UniformDisc2D(), f, (0.0, 0.0), 1.0, EvalSpec(abs_tol=1e-6))
    assert r.value == pytest.approx(oracle, abs=1e-5)


def test_polar_grid_equal_area():
    pts = polar_grid(32, 64)
    assert pts.shape == (32 * 64, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.max() < 1.0
    # Equal-area cells: the squared radii are uniform midpoints.
    assert np.allclose(np.sort(np.unique(np.round(r**2, 12))), (np.arange(32) + 0.5) / 32)


@pytest.mark.parametrize("dart", [D.Normal1D(), D.Uniform1D(-1, 1), D.Cauchy1D(), D.TentCF1D()],
                         ids=repr)
def test_mc_agrees_with_quad(dart):
    f = P.KDelta(0.2, 0.8)
    q = expect(dart, f, 0.1, 0.8, EvalSpec(abs_tol=1e-8))
    m = expect(dart, f, 0.1, 0.8, EvalSpec(engine="mc", abs_tol=3e-3, seed=4))
    assert abs(q.value - m.value) <= m.err_est + 1e-8
    assert m.engine_used == "mc"


def test_cantor_goes_to_mc():
    r = expect(D.Cantor1D(), P.SquareWave(), 0.0, 1.0, EvalSpec(abs_tol=2e-3))
    assert r.engine_used == "mc"
    # Cantor measure gives mass 1/2 to [0, 1/3] and [2/3, 1]; all of it lands in [0, 1].
    assert r.value == pytest.approx(1.0, abs=1e-12)


class Combo(P.Payoff):
    """Test-local lam * f1 + (1 - lam) * f2."""

    def __init__(self, lam, f1, f2):
        self.lam, self.f1, self.f2 = lam, f1, f2

    @property
    def sup_bound(self):
        return max(self.f1.sup_bound, self.f2.sup_bound)

    @property
    def inf_bound(self):
        return min(self.f1.inf_bound, self.f2.inf_bound)

    def _eval(self, x):
        return self.lam * self.f1(x) + (1 - self.lam) * self.f2(x)

    def knots(self, lo, hi):
        return np.union1d(self.f1.knots(lo, hi), self.f2.knots(lo, hi))


@given(st.floats(0.0, 1.0), st.floats(-3, 3), st.floats(0.1, 3))
@settings(max_examples=25)
def test_linearity_in_payoff(lam, a, d):
    f1, f2 = P.GaussBump((0.0,), 0.5), P.KDelta(0.1, 0.5)
    spec = EvalSpec(abs_tol=1e-9)
    e1 = expect(D.Normal1D(), f1, a, d, spec).value
    e2 = expect(D.Normal1D(), f2, a, d, spec).value
    em = expect(D.Normal1D(), Combo(lam, f1, f2), a, d, spec).value
    assert em == pytest.approx(lam * e1 + (1 - lam) * e2, abs=1e-8)


@given(st.floats(0.2, 3.0), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 3))
@settings(max_examples=25)
def test_affine_identity(s, b, a, d):
    inner = D.Uniform1D(-1.0, 1.5)
    f = P.KDelta(0.1, 0.5)
    spec = EvalSpec(abs_tol=1e-9)
    lhs = expect(D.Affine(s, (b,), inner), f, a, d, spec).value
    rhs = expect(inner, f, a + d * b, d * s, spec).value
    assert lhs == pytest.approx(rhs, abs=1e-8)


@given(st.sampled_from([D.Normal1D(), D.Uniform1D(0, 1), D.SemiCircle1D(), D.Cauchy1D(),
                        D.TentCF1D(), D.bern(0.3)]),
       st.floats(-3, 3), st.floats(0.1, 5))
@settings(max_examples=30)
def test_cos_closed_form_matches_engine(dart, a, d):
    r = expect(dart, P.Cosine(), a, d, EvalSpec(abs_tol=1e-8))
    assert r.value == pytest.approx(expect_cos_closed(dart, a, d), abs=1e-7)


def test_exact_engine():
    dart = D.IndepSum(((1.0, D.bern(0.5)), (2.0, D.GridUniform1D(2))))
    locs, masses = atom_table(dart)
    assert masses.sum() == pytest.approx(1.0)
    assert len(locs) == 6
    r = expect(dart, P.SquareWave(), 0.0, 1.0, EvalSpec(engine="exact"))
    assert r.engine_used == "exact"
    # Landing points 0,1,2,3,4,5 with mass 1/6 each; 0,1,2,3,4,5 all score 1.
    assert r.value == 1.0
    with pytest.raises(UnsupportedOperation):
        expect(D.Normal1D(), P.SquareWave(), 0.0, 1.0, EvalSpec(engine="exact"))


def test_mixture_of_point_and_normal():
    dart = D.Mixture(((0.5, D.Atomic.point(0.0)), (0.5, D.Normal1D())))
    r = expect(dart, P.point_step(), 0.0, 2.0)
    assert r.value == pytest.approx(0.5 + 0.25 * 2 * stats.norm.sf(0.5), abs=1e-7)


def test_nested_indep_sum():
    dart = D.IndepSum(((1.0, D.Normal1D()), (1.0, D.Uniform1D(-1, 1))))
    f = P.GaussBump((0.0,), 1.0)
    r = expect(dart, f, 0.0, 1.0, EvalSpec(abs_tol=1e-6))
    oracle, _ = integrate.quad(lambda u: 0.5 * math.sqrt(0.5) * math.exp(-u * u / 4), -1, 1)
    assert r.value == pytest.approx(oracle, abs=1e-5)


def test_d_zero_is_point_evaluation():
    assert expect(D.Normal1D(), P.SquareWave(), 0.5, 0.0).value == 1.0


def test_errors():
    with pytest.raises(ValueError):
        expect(D.Normal1D(), P.Dartboard(), 0.0, 1.0)
    with pytest.raises(ValueError):
        expect(D.Normal1D(), P.SquareWave(), 0.0, -1.0)
    with pytest.raises(ValueError):
        expect(D.UniformDisc2D(), P.Dartboard(), 0.0, 1.0)
    for bad in (dict(engine="x"), dict(abs_tol=0.0), dict(max_evals=10), dict(n_r=1)):
        with pytest.raises(ValueError):
            EvalSpec(**bad)


def test_mc_deterministic():
    spec = EvalSpec(engine="mc", abs_tol=1e-2, seed=9)
    a = expect(D.Normal1D(), P.SquareWave(), 0.0, 1.0, spec)
    b = expect(D.Normal1D(), P.SquareWave(), 0.0, 1.0, spec)
    assert a == b
