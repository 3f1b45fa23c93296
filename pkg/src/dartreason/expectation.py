"""Expected payoff E f(a + dX) with an error estimate.

Engines:

* ``exact``  finite sums over atoms (also IndepSum / Mixture of atomic darts);
* ``quad``   adaptive Gauss-Kronrod in quantile space for 1-D densities,
             a wrapped-density Fourier series for periodic payoffs under
             Normal, Cauchy and tent-cf darts, a stratified polar grid
             for the disc;
* ``mc``     Monte Carlo with a 3-sigma error bar.

``auto`` decomposes mixtures and sums, using exact sums on atomic parts and
quadrature elsewhere, and falls back to Monte Carlo for laws without a
usable density (Cantor, generic projections).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .darts import (Affine, Atomic, Cauchy1D, Dart, GridUniform1D, IndepSum, Mixture,
                    Normal1D, TentCF1D, UniformDisc2D, UnsupportedOperation, _Continuous1D)
from .payoffs import Cosine, Payoff
from .quadrature import gk15, integrate

ENGINES = ("auto", "exact", "quad", "mc")
MAX_ATOMS = 200_000
MAX_FOURIER_TERMS = 20_000
# Darts whose |cf| decreases on [0, inf), so the wrapped series can be cut.
WRAPPED_DARTS = (Normal1D, Cauchy1D, TentCF1D)


@dataclass(frozen=True)
class EvalSpec:
    engine: str = "auto"
    abs_tol: float = 1e-6
    seed: int = 0
    max_evals: int = 2_000_000
    n_r: int = 256
    n_theta: int = 512

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_evals < 1000:
            raise ValueError("max_evals must be at least 1000")
        if self.n_r < 2 or self.n_theta < 4:
            raise ValueError("polar grid too small")


@dataclass
class EvalResult:
    value: float
    err_est: float
    n_evals: int
    engine_used: str
    converged: bool = True


def _combine(parts, weights):
    """Weighted sum of EvalResults."""
    value = sum(w * p.value for w, p in zip(weights, parts))
    err = sum(w * p.err_est for w, p in zip(weights, parts))
    engines = sorted({e for p in parts for e in p.engine_used.split("+")})
    return EvalResult(float(value), float(err), sum(p.n_evals for p in parts),
                      "+".join(engines), all(p.converged for p in parts))


# -- atoms -------------------------------------------------------------------

def atom_table(dart: Dart):
    """(locations (n, dim), masses (n,)) of a purely atomic dart."""
    if isinstance(dart, GridUniform1D):
        dart = dart.as_atomic()
    if isinstance(dart, Atomic):
        return np.array(dart.locations, dtype=float), np.array(dart.masses, dtype=float)
    if isinstance(dart, Mixture):
        tabs = [atom_table(d) for _, d in dart.components]
        locs = np.concatenate([t[0] for t in tabs])
        masses = np.concatenate([w * t[1] for (w, _), t in zip(dart.components, tabs)])
        return locs, masses
    if isinstance(dart, Affine):
        locs, masses = atom_table(dart.inner)
        return dart.scale * locs + np.array(dart.shift), masses
    if isinstance(dart, IndepSum):
        locs = np.zeros((1, dart.dim))
        masses = np.ones(1)
        for c, d in dart.terms:
            if c == 0:
                continue
            l2, m2 = atom_table(d)
            if locs.shape[0] * l2.shape[0] > MAX_ATOMS:
                raise UnsupportedOperation("too many atoms for exact summation")
            locs = (locs[:, None, :] + c * l2[None, :, :]).reshape(-1, dart.dim)
            masses = (masses[:, None] * m2[None, :]).ravel()
        return locs, masses
    raise UnsupportedOperation(f"{type(dart).__name__} is not atomic")


def _exact(dart, payoff, a, d):
    locs, masses = atom_table(dart)
    pts = a + d * locs
    vals = payoff(pts[:, 0] if dart.dim == 1 else pts)
    vals = np.atleast_1d(np.asarray(vals, dtype=float))
    order = np.argsort(-masses, kind="stable")
    value = math.fsum(masses[order] * vals[order])
    # Rounding only: one ulp per term of the largest magnitude.
    err = float(np.finfo(float).eps * np.sum(masses * np.abs(vals)) * 4)
    return EvalResult(value, err, int(masses.size), "exact", True)


# -- quadrature ----------------------------------------------------------------

def _payoff_range(payoff):
    try:
        return max(payoff.sup_bound - payoff.inf_bound, 0.0)
    except NotImplementedError:
        return 1.0


def _quantile_quad(dart: _Continuous1D, payoff, a, d, tol, spec):
    """Integrate f(a + d ppf(u)) du over (0, 1) with knots mapped to u."""
    if payoff.dim == 2:
        raise UnsupportedOperation("1-D dart with a 2-D payoff")
    span = _payoff_range(payoff)
    if span == 0:
        return EvalResult(float(payoff(float(a))), 0.0, 1, "quad", True)
    lo, hi = dart.support()
    bounded = math.isfinite(lo) and math.isfinite(hi)
    tau = 0.0 if bounded else tol / (8.0 * span)
    u_lo, u_hi = tau, 1.0 - tau
    x_lo = lo if bounded else float(dart.ppf(u_lo))
    x_hi = hi if bounded else float(dart.ppf(u_hi))
    knots = payoff.knots(a + d * x_lo, a + d * x_hi)
    max_knots = spec.max_evals // 60
    truncated = knots.size > max_knots
    if truncated:
        knots = knots[np.linspace(0, knots.size - 1, max_knots).astype(int)]
    u_knots = np.clip(dart.cdf((np.asarray(knots) - a) / d), u_lo, u_hi)
    pts = np.concatenate([np.linspace(u_lo, u_hi, 9), u_knots])

    def integrand(u):
        return payoff(a + d * dart.ppf(u))

    core_tol = tol / 2 if tau else tol
    res = integrate(integrand, pts, abs_tol=core_tol, max_evals=spec.max_evals)
    value, err, n = res.value, res.err_est, res.n_evals
    if tau:
        tails, _ = gk15(integrand, [0.0, u_hi], [u_lo, 1.0])
        value += float(tails.sum())
        err += 2 * tau * span
        n += 30
    return EvalResult(float(value), float(err), n, "quad", res.converged and not truncated)


def _wrapped_quad(dart, payoff, a, d, tol, spec):
    """Periodic payoff: integrate over one period against the wrapped density
    of dX, built from its Fourier series (cf values at harmonics)."""
    P = payoff.period
    k = 2 * np.pi / P
    bound = max(abs(payoff.sup_bound), abs(payoff.inf_bound), 1e-300)
    # Cut the series once |phi| is negligible against tol.
    n = np.arange(1, MAX_FOURIER_TERMS + 1)
    mags = np.abs(dart.cf(k * d * n))
    small = np.nonzero(mags * P * bound < tol * 1e-3)[0]
    n_terms = int(small[0]) + 1 if small.size else MAX_FOURIER_TERMS
    n = n[:n_terms]
    coef = np.conj(dart.cf(k * d * n))
    tail = float(mags[n_terms:].sum()) * 2 * bound if not small.size else 0.0

    def integrand(y):
        y = np.asarray(y)
        rho = 1.0 + 2.0 * np.real(np.exp(1j * k * np.outer(y, n)) @ coef)
        return payoff(a + y) * rho / P

    pts = np.concatenate([np.linspace(0.0, P, 9), payoff.knots(a, a + P) - a])
    res = integrate(integrand, pts, abs_tol=tol, max_evals=spec.max_evals)
    return EvalResult(res.value, res.err_est + tail, res.n_evals, "quad",
                      res.converged and not tail)


def polar_grid(n_r, n_theta):
    """Equal-area stratified points in the unit disc, shape (n_r * n_theta, 2)."""
    r = np.sqrt((np.arange(n_r) + 0.5) / n_r)
    th = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    return np.stack([np.outer(r, np.cos(th)).ravel(), np.outer(r, np.sin(th)).ravel()], axis=1)


def _disc_mean(payoff, a, d, n_r, n_theta):
    pts = a + d * polar_grid(n_r, n_theta)
    return float(np.mean(payoff(pts)))


def _disc_quad(payoff, a, d, tol, spec):
    """Midpoint rule on the polar grid; error from comparison with the grid
    of half the resolution.  Doubles resolution until within tol."""
    n_r, n_theta = spec.n_r, spec.n_theta
    coarse = _disc_mean(payoff, a, d, n_r // 2, n_theta // 2)
    n_evals = (n_r // 2) * (n_theta // 2)
    while True:
        fine = _disc_mean(payoff, a, d, n_r, n_theta)
        n_evals += n_r * n_theta
        err = abs(fine - coarse)
        if err <= tol or 4 * n_r * n_theta > spec.max_evals:
            return EvalResult(fine, err, n_evals, "quad", err <= tol)
        coarse = fine
        n_r, n_theta = 2 * n_r, 2 * n_theta


def _quad(dart, payoff, a, d, tol, spec):
    if d == 0:
        v = payoff(a if dart.dim == 2 else float(a[0]))
        return EvalResult(float(v), 0.0, 1, "exact", True)
    if dart.is_atomic:
        try:
            return _exact(dart, payoff, a, d)
        except UnsupportedOperation:
            if spec.engine != "auto":
                raise
            return _mc(dart, payoff, a, d, tol, spec)
    if isinstance(dart, Mixture):
        parts = [_quad(c, payoff, a, d, tol, spec) for _, c in dart.components]
        return _combine(parts, [w for w, _ in dart.components])
    if isinstance(dart, Affine):
        return _quad(dart.inner, payoff, a + d * np.array(dart.shift), d * dart.scale, tol, spec)
    if isinstance(dart, IndepSum):
        return _indep_sum(dart, payoff, a, d, tol, spec)
    if isinstance(dart, UniformDisc2D):
        return _disc_quad(payoff, a, d, tol, spec)
    if isinstance(dart, _Continuous1D):
        a1 = float(a[0])
        if payoff.period is not None and isinstance(dart, WRAPPED_DARTS):
            return _wrapped_quad(dart, payoff, a1, d, tol, spec)
        return _quantile_quad(dart, payoff, a1, d, tol, spec)
    if spec.engine == "auto":
        return _mc(dart, payoff, a, d, tol, spec)
    raise UnsupportedOperation(f"no quadrature for {type(dart).__name__}")


def _indep_sum(dart, payoff, a, d, tol, spec):
    terms = [(c, t) for c, t in dart.terms if c > 0]
    if not terms:
        return _quad(Atomic.point((0.0,) * dart.dim), payoff, a, d, tol, spec)
    if len(terms) == 1:
        c, t = terms[0]
        return _quad(t, payoff, a, d * c, tol, spec)
    # Sum exactly over an atomic member when there is one.
    for i, (c, t) in enumerate(terms):
        if t.is_atomic:
            rest = IndepSum(tuple(terms[:i] + terms[i + 1:]))
            locs, masses = atom_table(t)
            parts = [_quad(rest, payoff, a + d * c * x, d, tol, spec) for x in locs]
            return _combine(parts, masses)
    if dart.dim != 1:
        if spec.engine == "auto":
            return _mc(dart, payoff, a, d, tol, spec)
        raise UnsupportedOperation("nested quadrature is 1-D only")
    (c, outer), rest = terms[0], IndepSum(tuple(terms[1:]))
    if not isinstance(outer, _Continuous1D):
        if spec.engine == "auto":
            return _mc(dart, payoff, a, d, tol, spec)
        raise UnsupportedOperation("outer member of a nested sum needs a density")

    class _Inner(Payoff):
        # x -> E f(x + d * rest), evaluated pointwise.
        sup_bound = payoff.sup_bound
        inf_bound = payoff.inf_bound
        n_evals = 0

        def _eval(self, xs):
            out = np.empty(xs.size)
            for j, x in enumerate(xs):
                r = _quad(rest, payoff, np.array([x]), d, tol / 2, spec)
                out[j] = r.value
                _Inner.n_evals += r.n_evals
            return out

    inner = _Inner()
    inner_spec = EvalSpec(engine=spec.engine if spec.engine != "auto" else "quad",
                          abs_tol=tol, seed=spec.seed, max_evals=max(spec.max_evals // 100, 1000))
    res = _quantile_quad(outer, inner, float(a[0]), d * c, tol / 2, inner_spec)
    return EvalResult(res.value, res.err_est + tol / 2, res.n_evals + _Inner.n_evals,
                      "quad", res.converged)


# -- Monte Carlo ---------------------------------------------------------------

def _mc(dart, payoff, a, d, tol, spec):
    pilot_n = min(10_000, spec.max_evals)
    x = dart.sample(spec.seed, pilot_n, key=(1,))
    pts = a + d * x if dart.dim == 2 else a[0] + d * x
    vals = np.asarray(payoff(pts), dtype=float)
    sd = float(np.std(vals))
    need = int(math.ceil(1.2 * (3.0 * sd / tol) ** 2)) if sd > 0 else pilot_n
    n = max(pilot_n, min(need, spec.max_evals))
    if n > pilot_n:
        chunks, total, done = [], 0.0, 0
        while done < n:
            m = min(1_000_000, n - done)
            x = dart.sample(spec.seed, m, key=(2, len(chunks)))
            pts = a + d * x if dart.dim == 2 else a[0] + d * x
            v = np.asarray(payoff(pts), dtype=float)
            chunks.append((v.sum(), (v * v).sum()))
            done += m
        s = sum(c[0] for c in chunks)
        s2 = sum(c[1] for c in chunks)
        mean = s / n
        sd = math.sqrt(max(s2 / n - mean * mean, 0.0))
    else:
        mean = float(np.mean(vals))
    err = 3.0 * sd / math.sqrt(n)
    return EvalResult(float(mean), err, n, "mc", err <= tol)


# -- entry points ----------------------------------------------------------------

def _aim_vector(a, dim):
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    if arr.shape != (dim,):
        raise ValueError(f"aim must have {dim} coordinate(s), got shape {arr.shape}")
    return arr


def expect(dart: Dart, payoff: Payoff, a, d: float, spec: EvalSpec = EvalSpec()) -> EvalResult:
    """E f(a + d X) together with an error estimate and evaluation count."""
    if payoff.dim is not None and payoff.dim != dart.dim:
        raise ValueError(f"dart is {dart.dim}-D but payoff is {payoff.dim}-D")
    if d < 0:
        raise ValueError("d must be nonnegative")
    a = _aim_vector(a, dart.dim)
    tol = spec.abs_tol
    if spec.engine == "exact":
        if not dart.is_atomic:
            raise UnsupportedOperation("exact engine needs an atomic dart")
        return _exact(dart, payoff, a, d)
    if spec.engine == "mc":
        return _mc(dart, payoff, a, d, tol, spec)
    return _quad(dart, payoff, a, d, tol, spec)


def expect_cos_closed(dart: Dart, a, d: float, direction=None) -> float:
    """E cos(w.(a + dX)) = Re(exp(i w.a) phi(d w)); w defaults to all ones."""
    a = _aim_vector(a, dart.dim)
    w = Cosine(direction).weights(dart.dim) if direction is not None else np.ones(dart.dim)
    t = d * w if dart.dim == 2 else d * w[0]
    phi = dart.cf(t)
    return float(np.real(np.exp(1j * float(np.dot(w, a))) * phi))
