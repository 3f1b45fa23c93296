"""Characteristic-function analytics.

Monotonicity scans of |phi|, the Bernoulli-plus-normal cosine criterion and
its phase boundary, a numerical test of whether phi(dt)/phi(t) is itself a
characteristic function, and the Cesaro energy of |phi|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .darts import Dart
from .payoffs import complex_zeros
from .quadrature import integrate
from .special import bessel_j, first_positive_zero, jinc

MONOTONE_TOL = 1e-12


@dataclass
class ScanReport:
    t_grid: np.ndarray
    abs_phi: np.ndarray
    monotone: bool
    first_violation: tuple | None


def cf_scan(dart: Dart, t_max: float, steps: int) -> ScanReport:
    """|phi| on a uniform grid of [0, t_max]; flags the first rise."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    t = np.linspace(0.0, t_max, steps)
    if dart.dim == 2:
        arg = np.stack([t, t], axis=1)
    else:
        arg = t
    mag = np.abs(np.asarray(dart.cf(arg)))
    rises = np.nonzero(mag[1:] > mag[:-1] + MONOTONE_TOL)[0]
    viol = (float(t[rises[0]]), float(t[rises[0] + 1])) if rises.size else None
    return ScanReport(t, mag, viol is None, viol)


# -- Bernoulli + normal -----------------------------------------------------------

@dataclass(frozen=True)
class BernNormalParams:
    p: float
    sigma: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass
class CriterionResult:
    reasonable_cos: bool
    min_value: float
    argmin_d: float
    conclusive: bool
    d_scanned: float


def criterion_value(params: BernNormalParams, d):
    """s^2 d (p^2 + q^2 + 2pq cos d) + pq sin d with q = 1 - p."""
    p, s2 = params.p, params.sigma**2
    q = 1.0 - p
    d = np.asarray(d, dtype=float)
    return s2 * d * (p * p + q * q + 2 * p * q * np.cos(d)) + p * q * np.sin(d)


def criterion_cutoff(params: BernNormalParams) -> float:
    """Beyond this d the expression is provably positive (inf when p = 1/2).

    s^2 d (p^2 + q^2 + 2pq cos d) >= s^2 d (1 - 2p)^2 and |pq sin d| <= pq.
    """
    p = params.p
    if p == 0.5:
        return math.inf
    return p * (1 - p) / (params.sigma**2 * (1 - 2 * p) ** 2)


def bern_normal_criterion(params: BernNormalParams, d_max: float = 4 * math.pi,
                          steps: int = 4000) -> CriterionResult:
    """Decide whether (Bern(p) + N(0, sigma^2), cos) is reasonable.

    The expression is scanned up to max(d_max, cutoff) (capped), local minima
    of the grid are polished with a bounded scalar minimiser, and the verdict
    is conclusive when the scan covers the cutoff.
    """
    if d_max < 4 * math.pi:
        raise ValueError("d_max must be at least 4*pi")
    cut = criterion_cutoff(params)
    span = d_max if math.isinf(cut) else min(max(d_max, cut + 2 * math.pi), 1e6)
    n = int(min(max(steps, span / (d_max / steps)), 2_000_000))
    d = np.linspace(0.0, span, n + 1)
    v = criterion_value(params, d)
    lows = np.nonzero((v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:]))[0] + 1
    best_v, best_d = float(v.min()), float(d[np.argmin(v)])
    # Polish the deepest dips; grid spacing can straddle very narrow ones.
    for i in lows[np.argsort(v[lows])][:64]:
        res = minimize_scalar(lambda x: float(criterion_value(params, x)),
                              bounds=(d[i - 1], d[i + 1]), method="bounded",
                              options={"xatol": 1e-14})
        if res.fun < best_v:
            best_v, best_d = float(res.fun), float(res.x)
    # Rounding bound of the expression at the minimiser.
    p = params.p
    scale = params.sigma**2 * best_d + p * (1 - p)
    ok = best_v >= -8 * np.finfo(float).eps * scale
    conclusive = (not ok) or span >= cut
    return CriterionResult(bool(ok), best_v, best_d, bool(conclusive), float(span))


def sufficient_sigma2(p: float) -> float:
    """sigma^2 at which the criterion provably holds: pq / (pi (1 - 2p)^2)."""
    return p * (1 - p) / (math.pi * (1 - 2 * p) ** 2)


def phase_boundary_sigma(p: float, tol: float = 1e-6) -> float:
    """Smallest sigma (within tol) for which the criterion holds, by bisection.

    The criterion is monotone in sigma because the sigma^2 coefficient is
    d |1 - p + p e^{id}|^2 >= 0.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        raise ValueError("no phase boundary at p = 1/2")

    def holds(sigma):
        return bern_normal_criterion(BernNormalParams(p, sigma)).reasonable_cos

    hi = math.sqrt(sufficient_sigma2(p)) * 1.001
    if not holds(hi):
        raise RuntimeError("criterion fails above the sufficient bound")
    lo = hi / 2
    while holds(lo):
        hi, lo = lo, lo / 2
        if lo < 1e-12:
            return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- divisibility -------------------------------------------------------------------

@dataclass
class DivisibilityReport:
    valid: bool
    min_density: float
    reason: str
    inconclusive: bool = False


def divisibility_check(dart: Dart, d: float, t_max: float = 64.0,
                       grid_n: int = 2**14) -> DivisibilityReport:
    """Test numerically whether psi(t) = phi(dt)/phi(t) is a characteristic
    function, i.e. whether dX has the law of X plus an independent term.

    psi is multiplied by the Fejer window (1 - |t|/T)_+, itself positive
    definite, and inverted with an FFT.  A genuine cf therefore gives a
    nonnegative reconstruction (up to rounding); a negative dip beyond
    1e-6 of the peak, or |psi| > 1 anywhere, rules it out.
    """
    if dart.dim != 1:
        raise ValueError("divisibility check is 1-D only")
    if not d > 1:
        raise ValueError("d must exceed 1")
    N = int(grid_n)
    dt = 2.0 * t_max / N
    t = (np.arange(N) - N // 2) * dt
    den = np.asarray(dart.cf(t), dtype=complex)
    num = np.asarray(dart.cf(d * t), dtype=complex)
    mag = np.abs(den)
    # Past the point where |phi| underflows for good, drop the ratio: the
    # window is narrowed to the range where it is computable.
    pos = mag[N // 2:]
    suffix = np.maximum.accumulate(pos[::-1])[::-1]
    dead = np.nonzero(suffix < 1e-200)[0]
    T = float(t[N // 2 + dead[0]]) if dead.size else t_max
    live = np.abs(t) < T
    zero = live & (mag < 1e-13)
    if np.any(zero):
        # Resolve 0/0 by stepping off the zero; a nonzero numerator is a pole.
        shift = dt * 1e-3
        den_s = np.asarray(dart.cf(t[zero] + shift), dtype=complex)
        num_s = np.asarray(dart.cf(d * (t[zero] + shift)), dtype=complex)
        if np.any((np.abs(num[zero]) > 1e-9) & (np.abs(den_s) < 1e-9)):
            return DivisibilityReport(False, -math.inf, "pole")
        den[zero], num[zero] = den_s, num_s
    psi = np.zeros(N, dtype=complex)
    psi[live] = num[live] / den[live]
    if not np.all(np.isfinite(psi)):
        return DivisibilityReport(False, -math.inf, "pole")
    if np.max(np.abs(psi)) > 1 + 1e-9:
        vals = psi[np.isfinite(psi)]
        return DivisibilityReport(False, -math.inf, "unbounded ratio"
                                  if np.max(np.abs(vals)) > 2 else "ratio exceeds 1")
    window = np.clip(1.0 - np.abs(t) / T, 0.0, None)
    v = window * psi
    dens = (dt / (2 * np.pi)) * np.real(np.fft.fft(np.fft.ifftshift(v)))
    peak = float(dens.max())
    low = float(dens.min())
    ok = peak > 0 and low >= -1e-6 * peak
    return DivisibilityReport(bool(ok), low, "ok" if ok else "negative density")


# -- Cesaro energy ------------------------------------------------------------------

def cesaro_energy(dart: Dart, T: float, abs_tol: float = 1e-8) -> float:
    """(1/T) * integral_0^T |phi(t)|^2 dt."""
    if not T > 0:
        raise ValueError("T must be positive")

    def integrand(t):
        arg = np.stack([t, np.zeros_like(t)], axis=1) if dart.dim == 2 else t
        return np.abs(np.asarray(dart.cf(arg))) ** 2

    pts = np.linspace(0.0, T, max(9, int(T) + 1))
    res = integrate(integrand, pts, abs_tol=abs_tol * T, max_evals=2_000_000)
    return res.value / T


def zeros(fn, x_max: float = 50.0, step: float = 0.5):
    """All zeros of fn on (0, x_max] found by bisection on sign changes."""
    out, lo = [], 0.0
    while True:
        try:
            z = first_positive_zero(fn, step=step, x_max=x_max, start=lo)
        except ValueError:
            return out
        out.append(z)
        lo = z + 1e-9


__all__ = ["ScanReport", "cf_scan", "bessel_j", "jinc", "first_positive_zero", "zeros",
           "BernNormalParams", "CriterionResult", "criterion_value", "criterion_cutoff",
           "bern_normal_criterion", "sufficient_sigma2", "phase_boundary_sigma",
           "DivisibilityReport", "divisibility_check", "cesaro_energy", "complex_zeros"]
