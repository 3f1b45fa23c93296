"""Named reproduction cases.  Each returns a list of Check records."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import analysis as A
from . import darts as D
from . import payoffs as P
from .expectation import EvalSpec, expect, expect_cos_closed
from .optimizer import best_aim, dartboard_sweep, g_curve


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  [{self.detail}]" if self.detail else "")


def _near(x, target, tol):
    return abs(x - target) <= tol


def _point_mass_normal():
    return D.Mixture(((0.5, D.Atomic.point(0.0)), (0.5, D.Normal1D(0.0, 1.0))))


def uniform_squarewave(threads=1):
    t0 = time.perf_counter()
    c = g_curve(D.Uniform1D(0.0, 2.0), P.SquareWave(), [1.0, 1.5], threads=threads)
    dt = time.perf_counter() - t0
    g1, g15 = c.points[0].g, c.points[1].g
    return [
        Check("g(1) = 0.5 +- 0.005", _near(g1, 0.5, 0.005), f"g(1)={g1:.6f}"),
        Check("g(1.5) = 0.6667 +- 0.005", _near(g15, 2 / 3, 0.005), f"g(1.5)={g15:.6f}"),
        Check("increase detected on (1, 1.5)", any(i[:2] == (1.0, 1.5) for i in c.increases),
              f"increases={c.increases}"),
        Check("runtime < 1 s", dt < 1.0, f"{dt:.3f} s"),
    ]


DARTBOARD_RADII = [3.0, 30.0, 33.6, 35.7, 37.0, 38.0, 39.0, 40.0, 41.0, 42.0, 43.0, 44.0,
                   45.0, 104.8, 107.0, 164.0, 170.0]


def dartboard_bumps(threads=4):
    t0 = time.perf_counter()
    c = dartboard_sweep(DARTBOARD_RADII, threads=threads)
    dt = time.perf_counter() - t0
    by_r = {p.d: p for p in c.points}
    inc = {(a, b) for a, b, _ in c.increases}
    # 20 -> 19 transition: last radius labelled 20 followed by one labelled 19.
    trans = [(p.d, q.d) for p, q in zip(c.points, c.points[1:])
             if p.label == "20" and q.label == "19"]
    mid = [(a + b) / 2 for a, b in trans]
    other = [(a, b) for a, b, _ in c.aim_jumps if (a, b) not in trans]
    near43 = [(a, b) for a, b in other if abs((a + b) / 2 - 43.0) <= 2.0]
    return [
        Check("g(3) = 60 +- 1e-6", _near(by_r[3.0].g, 60.0, 1e-6), f"g={by_r[3.0].g!r}"),
        Check("g(33.6) = 18.45 +- 0.10", _near(by_r[33.6].g, 18.45, 0.10), f"g={by_r[33.6].g:.4f}"),
        Check("g(35.7) = 18.60 +- 0.10 and > g(33.6)",
              _near(by_r[35.7].g, 18.60, 0.10) and by_r[35.7].g > by_r[33.6].g,
              f"g={by_r[35.7].g:.4f}"),
        Check("increase on (33.6, 35.7)", (33.6, 35.7) in inc),
        Check("increase on (104.8, 107)", (104.8, 107.0) in inc),
        Check("increase on (164, 170)", (164.0, 170.0) in inc),
        Check("sector 20 at r = 30", by_r[30.0].label == "20", f"label={by_r[30.0].label}"),
        Check("sector 19 at r = 41", by_r[41.0].label == "19", f"label={by_r[41.0].label}"),
        Check("20 -> 19 transition within 39 +- 2", len(mid) == 1 and abs(mid[0] - 39.0) <= 2.0,
              f"transitions={trans}"),
        Check("another aim jump near 43 +- 2", bool(near43), f"jumps={other}"),
        Check("runtime < 120 s", dt < 120.0, f"{dt:.1f} s"),
    ]


def cos_criterion(threads=1):
    checks = []
    worst = 0.0
    for dart in (D.Normal1D(0.0, 1.0), D.Uniform1D(0.0, 1.0), D.SemiCircle1D()):
        for d in (0.5, 1.0, 2.0, 4.0):
            for a in (0.0, 0.7):
                q = expect(dart, P.Cosine(), a, d, EvalSpec(abs_tol=1e-8)).value
                worst = max(worst, abs(q - expect_cos_closed(dart, a, d)))
    checks.append(Check("closed form vs quadrature < 1e-4", worst < 1e-4, f"max diff {worst:.2e}"))
    verdicts = {"normal(0,1)": (D.Normal1D(0.0, 1.0), True), "bern(0.5)": (D.bern(0.5), False),
                "tentcf": (D.TentCF1D(), True), "semicircle": (D.SemiCircle1D(), False)}
    for name, (dart, want) in verdicts.items():
        rep = A.cf_scan(dart, 4 * math.pi, 4000)
        checks.append(Check(f"|phi| scan verdict for {name}", rep.monotone == want,
                            f"monotone={rep.monotone}, first violation={rep.first_violation}"))
    return checks


def bern_normal_phase(threads=1):
    checks = []
    for s in (0.1, 1.0, 10.0):
        r = A.bern_normal_criterion(A.BernNormalParams(0.5, s))
        checks.append(Check(f"p=1/2, sigma={s}: not reasonable", not r.reasonable_cos,
                            f"min={r.min_value:.3e} at d={r.argmin_d:.4f}"))
    r = A.bern_normal_criterion(A.BernNormalParams(0.3, math.sqrt(0.4178)))
    checks.append(Check("p=0.3, sigma^2=0.4178: reasonable", r.reasonable_cos,
                        f"min={r.min_value:.3e}"))
    r = A.bern_normal_criterion(A.BernNormalParams(0.3, 0.05))
    checks.append(Check("p=0.3, sigma=0.05: not reasonable", not r.reasonable_cos,
                        f"min={r.min_value:.3e} at d={r.argmin_d:.4f}"))
    sp = A.phase_boundary_sigma(0.3, tol=1e-6)
    hi = A.bern_normal_criterion(A.BernNormalParams(0.3, sp + 1e-3)).reasonable_cos
    lo = A.bern_normal_criterion(A.BernNormalParams(0.3, sp - 1e-3)).reasonable_cos
    checks.append(Check("sigma_p^2 <= 0.4178 + 1e-3", sp**2 <= 0.4178 + 1e-3, f"sigma_p^2={sp**2:.6f}"))
    checks.append(Check("criterion flips within +-1e-3 of sigma_p", hi and not lo, f"sigma_p={sp:.6f}"))
    return checks


def pointmass_increasing(threads=1):
    grid = [0.5, 1.0, 2.0, 5.0]
    c = g_curve(_point_mass_normal(), P.point_step(), grid, threads=threads)
    oracle = [0.5 + 0.25 * 2 * stats.norm.sf(1 / d) for d in grid]
    diff = max(abs(p.g - o) for p, o in zip(c.points, oracle))
    g = [p.g for p in c.points]
    return [
        Check("g matches 1/2 + 1/4 P(|Z| > 1/d) within 0.01", diff <= 0.01, f"max diff {diff:.2e}"),
        Check("g strictly increasing", all(b > a for a, b in zip(g, g[1:])),
              ", ".join(f"{v:.4f}" for v in g)),
    ]


def comb_limit(threads=1):
    comb = P.make_comb(5, 8)
    r = best_aim(D.GridUniform1D(5), comb, 1.0)
    at10 = expect(D.GridUniform1D(5), comb, 10.0, 1.0).value
    u = best_aim(D.Uniform1D(0.0, 1.0), comb, 1.0)
    return [
        Check("g(grid(5), comb) at d=1 equals 1", r.g == 1.0 and at10 == 1.0,
              f"g={r.g!r}, E at aim 10 = {at10!r}, aim={r.aim}"),
        Check("g(uniform(0,1), comb) at d=1 <= 0.6", u.g <= 0.6, f"g={u.g:.4f}"),
    ]


def selfdecomp_ratio(threads=1):
    checks = []
    for dart in (D.Normal1D(0.0, 1.0), D.Cauchy1D(0.0, 1.0)):
        for d in (1.1, 1.5, 2.0, 3.0):
            r = A.divisibility_check(dart, d)
            checks.append(Check(f"{type(dart).__name__} divides at d={d}", r.valid, r.reason))
    r = A.divisibility_check(D.Uniform1D(0.0, 1.0), 2.0)
    checks.append(Check("uniform(0,1) divides at d=2", r.valid, r.reason))
    r = A.divisibility_check(D.Uniform1D(0.0, 1.0), 1.5)
    checks.append(Check("uniform(0,1) does not divide at d=1.5", not r.valid, r.reason))
    return checks


def zero_construct(threads=1):
    dart = D.bern(0.3)
    h = P.make_zero_construct(dart)
    B = h.B
    probes = np.linspace(-3 * (1 + B), 3 * (1 + B), 20)
    vals = [expect(dart, h, a, 1.0).value for a in probes]
    inner = np.linspace(-(1 + B), 1 + B, 20)
    eq = [abs(expect(dart, h, a, 1.0).value) for a in inner]
    r = best_aim(dart, h, 2.0)
    return [
        Check("E h(a + X) <= 1e-9 at 20 probes", max(vals) <= 1e-9, f"max={max(vals):.3e}"),
        Check("|E h(a + X)| < 1e-12 on |a| <= 1 + B", max(eq) < 1e-12,
              f"max={max(eq):.3e} (B={B:g})"),
        Check("g at d=2 >= 2.30", r.g >= 2.30, f"g={r.g:.6f} at aim {r.aim}"),
    ]


def kdelta(threads=1):
    dart = _point_mass_normal()
    g50 = best_aim(dart, P.KDelta(0.1, 0.5), 50.0).g
    g005 = best_aim(dart, P.KDelta(0.01, 0.5), 0.05).g
    c = g_curve(dart, P.KDelta(0.01, 0.5), [0.05, 50.0], threads=threads)
    return [
        Check("g(d=50, delta=0.1) >= 0.74", g50 >= 0.74, f"g={g50:.4f}"),
        Check("g(d=0.05, delta=0.01) <= 0.60", g005 <= 0.60, f"g={g005:.4f}"),
        Check("increase detected (delta=0.01, d: 0.05 -> 50)", bool(c.increases),
              f"increases={c.increases}"),
    ]


def singular_atom(threads=1):
    dart = D.Mixture(((0.5, D.Atomic.point(0.0)), (0.5, D.Cauchy1D(0.0, 1.0))))
    pay = P.SingularAtom(0.0, 0.5)
    c = g_curve(dart, pay, [0.05, 1.0], threads=threads)
    g005, g1 = c.points[0].g, c.points[1].g
    oracle = [2 + 0.5 * 2 * stats.cauchy.sf(2 / t) for t in (0.05, 1.0)]
    return [
        Check("g(1) >= 2.14", g1 >= 2.14, f"g={g1:.4f}, oracle {oracle[1]:.4f}"),
        Check("g(0.05) <= 2.05", g005 <= 2.05, f"g={g005:.4f}, oracle {oracle[0]:.4f}"),
        Check("increase detected", bool(c.increases), f"increases={c.increases}"),
    ]


def projection_semicircle(threads=1):
    ds = [1.0, 2.0, 3.0, 4.0]
    semi = g_curve(D.SemiCircle1D(), P.Cosine(), ds)
    disc = g_curve(D.UniformDisc2D(), P.Cosine((1.0, 0.0)), ds, EvalSpec(abs_tol=1e-4),
                   threads=threads, use_closed_form=False)
    e1 = max(abs(p.g - abs(A.jinc(d))) for p, d in zip(semi.points, ds))
    e2 = max(abs(p.g - q.g) for p, q in zip(semi.points, disc.points))
    z0 = A.first_positive_zero(lambda x: A.bessel_j(0, x))
    z1 = A.first_positive_zero(A.jinc)
    phi3 = D.SemiCircle1D().cf(3.0).real
    phi4 = D.SemiCircle1D().cf(4.0).real
    return [
        Check("g(semicircle, cos) = |2 J1(d)/d| within 1e-6", e1 <= 1e-6, f"max diff {e1:.2e}"),
        Check("g(semicircle, cos) = g(disc, cos(x1)) within 1e-3", e2 <= 1e-3, f"max diff {e2:.2e}"),
        Check("first zero of J0 = 2.4048 +- 1e-3", _near(z0, 2.4048, 1e-3), f"{z0:.6f}"),
        Check("first zero of 2 J1(d)/d = 3.8317 +- 1e-3", _near(z1, 3.8317, 1e-3), f"{z1:.6f}"),
        Check("semicircle cf > 0 at 3 and < 0 at 4", phi3 > 0 > phi4, f"{phi3:.4f}, {phi4:.4f}"),
    ]


def tent_cf(threads=1):
    rep = A.cf_scan(D.TentCF1D(), 2.0, 1000)
    ds = [0.25, 0.5, 0.75, 1.0, 1.5]
    c = g_curve(D.TentCF1D(), P.Cosine(), ds, EvalSpec(abs_tol=1e-6), use_closed_form=False)
    diff = max(abs(p.g - max(1 - d, 0.0)) for p, d in zip(c.points, ds))
    num = max(abs(D.cf_numeric(D.TentCF1D(), t)[0] - max(1 - t, 0.0)) for t in (0.0, 0.3, 0.7, 1.2))
    return [
        Check("|phi| scan of the tent-cf dart is monotone", rep.monotone),
        Check("optimised cos g-curve equals (1 - d)_+ within 1e-3", diff <= 1e-3, f"max diff {diff:.2e}"),
        Check("cf from the density equals the tent within 1e-3", num <= 1e-3, f"max diff {num:.2e}"),
        Check("cos g-curve has no increases", not c.increases),
    ]


CASES = {
    "uniform-squarewave": uniform_squarewave,
    "dartboard-bumps": dartboard_bumps,
    "cos-criterion": cos_criterion,
    "bern-normal-phase": bern_normal_phase,
    "pointmass-increasing": pointmass_increasing,
    "comb-limit": comb_limit,
    "selfdecomp-ratio": selfdecomp_ratio,
    "zero-construct": zero_construct,
    "kdelta": kdelta,
    "singular-atom": singular_atom,
    "projection-semicircle": projection_semicircle,
    "tent-cf": tent_cf,
}


def run_case(name, threads=1):
    if name not in CASES:
        raise KeyError(name)
    return CASES[name](threads=threads)
