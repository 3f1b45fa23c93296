"""Dart distributions: characteristic functions, samplers and transforms.

A dart is the landing offset when aiming at the origin from distance one.
All darts are immutable value objects on R or R^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

MERGE_TOL = 1e-12
MASS_TOL = 1e-12
CANTOR_FACTORS = 60
CANTOR_DIGITS = 40
UNBOUNDED_SCALES = 8.0


class UnsupportedOperation(ValueError):
    """Raised when a dart has no closed form for the requested operation."""


def make_rng(seed, key=()):
    """Counter-based Philox generator keyed by (seed, stream path)."""
    seq = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def _bisect_ppf(cdf, u, lo, hi, iters=64):
    u = np.asarray(u, dtype=float)
    a = np.full(u.shape, lo, dtype=float)
    b = np.full(u.shape, hi, dtype=float)
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = cdf(m) < u
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    return 0.5 * (a + b)


class Dart:
    """Base class; subclasses are frozen dataclasses."""

    dim: int = 1

    # -- characteristic function -------------------------------------------
    def cf(self, t):
        """E exp(i t.X).  ``t`` has shape (...,) in 1-D and (..., 2) in 2-D."""
        arr = np.asarray(t, dtype=float)
        if self.dim == 2 and arr.shape[-1:] != (2,):
            raise ValueError("2-D dart needs t with trailing dimension 2")
        out = np.asarray(self._cf(arr), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    def _cf(self, t):
        raise UnsupportedOperation(f"no closed-form cf for {type(self).__name__}")

    # -- sampling ------------------------------------------------------------
    def sample(self, seed, n, key=()):
        if n < 1:
            raise ValueError("n must be >= 1")
        return self._draw(seed, tuple(key), int(n))

    def _draw(self, seed, key, n):
        raise NotImplementedError

    # -- structure used by the integration engines --------------------------
    def radius(self):
        """Support radius, or UNBOUNDED_SCALES scale units if unbounded."""
        raise NotImplementedError

    def atoms(self):
        """Atomic part as a list of (location tuple, mass)."""
        return []

    @property
    def is_atomic(self):
        return False

    @property
    def has_density(self):
        return False


def _as_loc(x):
    if isinstance(x, (tuple, list, np.ndarray)):
        return tuple(float(v) for v in x)
    return (float(x),)


@dataclass(frozen=True)
class Atomic(Dart):
    """Finitely many point masses.  Locations are tuples (length = dim)."""

    locations: tuple
    masses: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        locs = [_as_loc(x) for x in self.locations]
        masses = [float(m) for m in self.masses]
        if not locs or len(locs) != len(masses):
            raise ValueError("Atomic needs matching, non-empty locations and masses")
        dims = {len(x) for x in locs}
        if len(dims) != 1 or dims.pop() not in (1, 2):
            raise ValueError("atom locations must all be 1-D or all 2-D")
        if any(m <= 0 for m in masses):
            raise ValueError("atom masses must be positive")
        if abs(sum(masses) - 1.0) > MASS_TOL:
            raise ValueError(f"atom masses sum to {sum(masses)!r}, not 1")
        merged = {}
        for x, m in sorted(zip(locs, masses)):
            for y in merged:
                if max(abs(a - b) for a, b in zip(x, y)) <= MERGE_TOL:
                    merged[y] += m
                    break
            else:
                merged[x] = m
        object.__setattr__(self, "locations", tuple(merged))
        object.__setattr__(self, "masses", tuple(merged.values()))
        object.__setattr__(self, "dim", len(locs[0]))

    @classmethod
    def point(cls, x):
        return cls((x,), (1.0,))

    def _points(self):
        return np.array(self.locations)

    def _cf(self, t):
        pts = self._points()
        m = np.array(self.masses)
        if self.dim == 1:
            phase = t[..., None] * pts[:, 0]
        else:
            phase = t @ pts.T
        return np.exp(1j * phase) @ m

    def cf_complex(self, z):
        """Entire extension: sum of m_j exp(i z x_j) for complex z (1-D)."""
        if self.dim != 1:
            raise UnsupportedOperation("complex extension only for 1-D atoms")
        z = np.asarray(z, dtype=complex)
        pts = self._points()[:, 0]
        out = np.exp(1j * z[..., None] * pts) @ np.array(self.masses)
        return complex(out) if out.ndim == 0 else out

    def _draw(self, seed, key, n):
        rng = make_rng(seed, key)
        idx = rng.choice(len(self.masses), size=n, p=np.array(self.masses))
        pts = self._points()[idx]
        return pts[:, 0] if self.dim == 1 else pts

    def radius(self):
        return float(np.max(np.linalg.norm(self._points(), axis=1)))

    def atoms(self):
        return list(zip(self.locations, self.masses))

    @property
    def is_atomic(self):
        return True


def bern(p):
    """Bernoulli(p) on {0, 1} as an Atomic dart."""
    p = float(p)
    if not 0.0 < p < 1.0:
        if p in (0.0, 1.0):
            return Atomic.point(p)
        raise ValueError(f"bern(p) needs 0 <= p <= 1, got {p}")
    return Atomic((0.0, 1.0), (1.0 - p, p))


class _Continuous1D(Dart):
    """1-D darts with a density; engines integrate in quantile space."""

    dim = 1

    @property
    def has_density(self):
        return True

    def cdf(self, x):
        raise NotImplementedError

    def ppf(self, u):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def support(self):
        return (-math.inf, math.inf)

    def _draw(self, seed, key, n):
        return self.ppf(make_rng(seed, key).random(n))


@dataclass(frozen=True)
class Uniform1D(_Continuous1D):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("Uniform1D needs lo < hi")

    def _cf(self, t):
        half = 0.5 * (self.hi - self.lo)
        mid = 0.5 * (self.hi + self.lo)
        return np.exp(1j * t * mid) * np.sinc(t * half / np.pi)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def ppf(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u, dtype=float)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def support(self):
        return (self.lo, self.hi)

    def radius(self):
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class Normal1D(_Continuous1D):
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("Normal1D needs sd > 0")

    def _cf(self, t):
        return np.exp(1j * t * self.mean - 0.5 * (self.sd * t) ** 2)

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def ppf(self, u):
        return self.mean + self.sd * special.ndtri(np.asarray(u, dtype=float))

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2 * math.pi))

    def radius(self):
        return abs(self.mean) + UNBOUNDED_SCALES * self.sd


@dataclass(frozen=True)
class Cauchy1D(_Continuous1D):
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("Cauchy1D needs scale > 0")

    def _cf(self, t):
        return np.exp(1j * t * self.loc - self.scale * np.abs(t))

    def cdf(self, x):
        return 0.5 + np.arctan((np.asarray(x, dtype=float) - self.loc) / self.scale) / np.pi

    def ppf(self, u):
        return self.loc + self.scale * np.tan(np.pi * (np.asarray(u, dtype=float) - 0.5))

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        return 1.0 / (np.pi * self.scale * (1.0 + z * z))

    def radius(self):
        return abs(self.loc) + UNBOUNDED_SCALES * self.scale


def _bessel_j0(t):
    return special.j0(t)


def _jinc(t):
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 - t * t / 8.0, 2.0 * special.j1(safe) / safe)


@dataclass(frozen=True)
class SemiCircle1D(_Continuous1D):
    """Density (2/pi) sqrt(1 - x^2) on [-1, 1]."""

    def _cf(self, t):
        return _jinc(t)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        return 0.5 + (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) / np.pi

    def ppf(self, u):
        return _bisect_ppf(self.cdf, u, -1.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= 1, 2.0 / np.pi * np.sqrt(np.clip(1.0 - x * x, 0.0, None)), 0.0)

    def support(self):
        return (-1.0, 1.0)

    def radius(self):
        return 1.0


@dataclass(frozen=True)
class Arcsine1D(_Continuous1D):
    """Density 1 / (pi sqrt((1+x)(1-x))) on [-1, 1]."""

    def _cf(self, t):
        return _bessel_j0(t)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        return 0.5 + np.arcsin(x) / np.pi

    def ppf(self, u):
        return np.sin(np.pi * (np.asarray(u, dtype=float) - 0.5))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 1
        safe = np.where(inside, x, 0.0)
        return np.where(inside, 1.0 / (np.pi * np.sqrt(1.0 - safe * safe)), 0.0)

    def support(self):
        return (-1.0, 1.0)

    def radius(self):
        return 1.0


@dataclass(frozen=True)
class TentCF1D(_Continuous1D):
    """Density (1 - cos x) / (pi x^2); its cf is the tent max(1 - |t|, 0)."""

    def _cf(self, t):
        return np.maximum(1.0 - np.abs(t), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        small = np.abs(x) < 1e-6
        safe = np.where(small, 1.0, x)
        si, _ = special.sici(safe)
        val = 0.5 + (si - (1.0 - np.cos(safe)) / safe) / np.pi
        return np.where(small, 0.5 + x / (2 * np.pi), val)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        # 1 - F(x) >= 1/(pi x) - 1/(pi x^2) bounds the bracket for extreme u.
        tail = np.minimum(u, 1.0 - u)
        span = np.maximum(4.0 / (np.pi * np.maximum(tail, 1e-300)), 10.0)
        lo = -np.max(span)
        return _bisect_ppf(self.cdf, u, lo, -lo, iters=200)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        small = np.abs(x) < 1e-4
        safe = np.where(small, 1.0, x)
        return np.where(small, (0.5 - x * x / 24.0) / np.pi, (1.0 - np.cos(safe)) / (np.pi * safe * safe))

    def tail_cf(self, t, cut):
        """Exact contribution of |x| > cut to the cf, via sine integrals."""
        t = np.asarray(t, dtype=float)

        def tail_cos(a):
            # integral_cut^inf cos(a x) / x^2 dx
            a = np.abs(a)
            si, _ = special.sici(a * cut)
            return np.cos(a * cut) / cut - a * (np.pi / 2 - si)

        inner = tail_cos(t) - 0.5 * tail_cos(t + 1.0) - 0.5 * tail_cos(t - 1.0)
        return 2.0 / np.pi * inner

    def _draw(self, seed, key, n):
        # Rejection from a standard Cauchy; the density ratio is <= 2.5.
        rng = make_rng(seed, key)
        out = np.empty(0)
        while out.size < n:
            m = int(1.2 * 2.5 * (n - out.size)) + 16
            x = np.tan(np.pi * (rng.random(m) - 0.5))
            ratio = self.pdf(x) * np.pi * (1.0 + x * x) / 2.5
            out = np.concatenate([out, x[rng.random(m) < ratio]])
        return out[:n]

    def radius(self):
        return UNBOUNDED_SCALES


@dataclass(frozen=True)
class Cantor1D(Dart):
    """Middle-thirds Cantor measure on [0, 1]; continuous but singular."""

    dim = 1

    def _cf(self, t):
        out = np.exp(0.5j * t)
        scale = 1.0
        for _ in range(CANTOR_FACTORS):
            scale /= 3.0
            out = out * np.cos(t * scale)
        return out

    def _draw(self, seed, key, n):
        digits = make_rng(seed, key).integers(0, 2, size=(n, CANTOR_DIGITS))
        weights = 2.0 / 3.0 ** np.arange(1, CANTOR_DIGITS + 1)
        return digits @ weights

    def radius(self):
        return 1.0


@dataclass(frozen=True)
class GridUniform1D(Dart):
    """Uniform on {0, 1/k, ..., 1}."""

    k: int
    dim = 1

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("GridUniform1D needs a positive integer k")

    def as_atomic(self):
        n = self.k + 1
        return Atomic(tuple(j / self.k for j in range(n)), (1.0 / n,) * n)

    def _cf(self, t):
        return self.as_atomic()._cf(t)

    def _draw(self, seed, key, n):
        return make_rng(seed, key).integers(0, self.k + 1, size=n) / self.k

    def radius(self):
        return 1.0

    def atoms(self):
        return self.as_atomic().atoms()

    @property
    def is_atomic(self):
        return True


@dataclass(frozen=True)
class UniformDisc2D(Dart):
    """Uniform distribution on the unit disc in R^2."""

    dim = 2

    def _cf(self, t):
        return _jinc(np.linalg.norm(t, axis=-1))

    def _draw(self, seed, key, n):
        rng = make_rng(seed, key)
        r = np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    def radius(self):
        return 1.0

    @property
    def has_density(self):
        return True


def _check_members(items, what):
    if not items:
        raise ValueError(f"{what} needs at least one member")
    dims = {d.dim for _, d in items}
    if len(dims) != 1:
        raise ValueError(f"{what} members must share one dimension")
    return dims.pop()


@dataclass(frozen=True)
class Mixture(Dart):
    """Convex combination; ``components`` is a tuple of (weight, dart)."""

    components: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        comps = tuple((float(w), d) for w, d in self.components)
        if any(w <= 0 for w, _ in comps):
            raise ValueError("mixture weights must be positive")
        if abs(sum(w for w, _ in comps) - 1.0) > MASS_TOL:
            raise ValueError("mixture weights must sum to 1")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "dim", _check_members(comps, "Mixture"))

    def _cf(self, t):
        return sum(w * d._cf(t) for w, d in self.components)

    def _draw(self, seed, key, n):
        rng = make_rng(seed, key + (0,))
        w = np.array([w for w, _ in self.components])
        idx = rng.choice(len(w), size=n, p=w / w.sum())
        shape = (n,) if self.dim == 1 else (n, 2)
        out = np.empty(shape)
        for j, (_, d) in enumerate(self.components):
            sel = idx == j
            if sel.any():
                out[sel] = d._draw(seed, key + (j + 1,), int(sel.sum()))
        return out

    def radius(self):
        return max(d.radius() for _, d in self.components)

    def atoms(self):
        return [(x, w * m) for w, d in self.components for x, m in d.atoms()]

    @property
    def is_atomic(self):
        return all(d.is_atomic for _, d in self.components)

    @property
    def has_density(self):
        return all(d.has_density for _, d in self.components)


@dataclass(frozen=True)
class IndepSum(Dart):
    """Independent sum  sum_j c_j X_j ; ``terms`` is a tuple of (c, dart)."""

    terms: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        terms = tuple((float(c), d) for c, d in self.terms)
        if any(c < 0 for c, _ in terms):
            raise ValueError("IndepSum scales must be nonnegative")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "dim", _check_members(terms, "IndepSum"))

    def _cf(self, t):
        out = np.ones(t.shape[:-1] if self.dim == 2 else t.shape, dtype=complex)
        for c, d in self.terms:
            out = out * d._cf(c * t)
        return out

    def _draw(self, seed, key, n):
        total = 0.0
        for j, (c, d) in enumerate(self.terms):
            total = total + c * d._draw(seed, key + (j,), n)
        return total

    def radius(self):
        return sum(c * d.radius() for c, d in self.terms)

    @property
    def is_atomic(self):
        return all(d.is_atomic or c == 0 for c, d in self.terms)

    @property
    def has_density(self):
        return any(d.has_density and c > 0 for c, d in self.terms)


@dataclass(frozen=True)
class Affine(Dart):
    """scale * inner + shift, with scale > 0."""

    scale: float
    shift: tuple
    inner: Dart
    dim: int = field(init=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("Affine scale must be positive")
        shift = _as_loc(self.shift)
        if len(shift) != self.inner.dim:
            raise ValueError("Affine shift dimension mismatch")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "dim", self.inner.dim)

    def _shift_dot(self, t):
        b = np.array(self.shift)
        return t * b[0] if self.dim == 1 else t @ b

    def _cf(self, t):
        return np.exp(1j * self._shift_dot(t)) * self.inner._cf(self.scale * t)

    def _draw(self, seed, key, n):
        x = self.inner._draw(seed, key, n)
        b = np.array(self.shift)
        return self.scale * x + (b[0] if self.dim == 1 else b)

    def radius(self):
        return self.scale * self.inner.radius() + float(np.linalg.norm(self.shift))

    def atoms(self):
        b = np.array(self.shift)
        return [(tuple(self.scale * np.array(x) + b), m) for x, m in self.inner.atoms()]

    @property
    def is_atomic(self):
        return self.inner.is_atomic

    @property
    def has_density(self):
        return self.inner.has_density


@dataclass(frozen=True)
class Projected(Dart):
    """w . X for a 2-D dart X; sampled, cf via phi_X(t w), no density."""

    inner: Dart
    direction: tuple
    dim = 1

    def _cf(self, t):
        w = np.array(self.direction)
        return self.inner._cf(np.asarray(t)[..., None] * w)

    def _draw(self, seed, key, n):
        return self.inner._draw(seed, key, n) @ np.array(self.direction)

    def radius(self):
        return self.inner.radius() * float(np.linalg.norm(self.direction))


def cf(dart: Dart, t):
    return dart.cf(t)


def cf_complex(dart: Dart, z):
    """Entire extension of the cf of a finitely-atomic 1-D dart."""
    if isinstance(dart, GridUniform1D):
        dart = dart.as_atomic()
    if not isinstance(dart, Atomic):
        raise UnsupportedOperation("cf_complex needs an Atomic dart")
    return dart.cf_complex(z)


def sample(dart: Dart, seed: int, n: int):
    return dart.sample(seed, n)


def project(dart: Dart, direction: Sequence[float]) -> Dart:
    """Law of direction . X for a 2-D dart X."""
    w = np.asarray(direction, dtype=float)
    if dart.dim != 2 or w.shape != (2,):
        raise ValueError("project needs a 2-D dart and a 2-vector")
    if not abs(np.linalg.norm(w) - 1.0) < 1e-12:
        raise ValueError("direction must be a unit vector")
    if isinstance(dart, UniformDisc2D):
        return SemiCircle1D()
    if isinstance(dart, Atomic):
        return Atomic(tuple(float(np.dot(x, w)) for x in dart.locations), dart.masses)
    if isinstance(dart, Mixture):
        return Mixture(tuple((wt, project(d, w)) for wt, d in dart.components))
    if isinstance(dart, IndepSum):
        return IndepSum(tuple((c, project(d, w)) for c, d in dart.terms))
    if isinstance(dart, Affine):
        inner = project(dart.inner, w)
        shift = float(np.dot(dart.shift, w))
        return Affine(dart.scale, (shift,), inner)
    return Projected(dart, tuple(float(v) for v in w))


def _tail_cut(dart, t, bound=1e-10):
    """Cut points for an unbounded unimodal density and the tail error.

    Each tail beyond R contributes at most min(mass, 2 pdf(R) / |t|) (second
    mean value theorem), so R grows until that drops below ``bound`` or the
    tail mass is below 0.5e-8.
    """
    cuts, err = [], 0.0
    mid = float(dart.ppf(0.5))
    for u, sign in ((1e-3, -1.0), (1 - 1e-3, 1.0)):
        x = float(dart.ppf(u))
        while True:
            mass = float(dart.cdf(x)) if sign < 0 else float(1.0 - dart.cdf(x))
            osc = 2.0 * float(dart.pdf(x)) / abs(t) if t != 0 else math.inf
            e = min(mass, osc)
            if e <= bound or mass <= 0.5e-8:
                break
            x = mid + 2.0 * (x - mid)
        cuts.append(x)
        err += e
    return cuts[0], cuts[1], err


def cf_numeric(dart: Dart, t, abs_tol=1e-9):
    """Fourier integral of the density, for cross-checking closed forms.

    Returns (value, err_est).  Compact darts integrate over their support;
    the tent-cf dart gets its tails from sine integrals; other unbounded
    darts are cut where the tail mass drops below 1e-8.
    """
    from .quadrature import integrate

    if not isinstance(dart, _Continuous1D):
        raise UnsupportedOperation("numeric cf needs a 1-D density dart")
    t = float(t)
    tail_err = 0.0
    if isinstance(dart, Arcsine1D):
        # x = sin(theta) removes the endpoint singularity.
        def integrand(th, part):
            return part(np.exp(1j * t * np.sin(th))) / np.pi
        lo, hi = -np.pi / 2, np.pi / 2
        pts = np.linspace(lo, hi, 17)
    else:
        lo, hi = dart.support()
        if not math.isfinite(lo):
            if isinstance(dart, TentCF1D):
                lo, hi = -200.0 * np.pi, 200.0 * np.pi
            else:
                lo, hi, tail_err = _tail_cut(dart, t)
        n_pts = max(17, int((hi - lo) * abs(t) / np.pi) + 2)

        def integrand(x, part):
            return part(dart.pdf(x) * np.exp(1j * t * x))
        # Quantile knots keep the bulk resolved however wide the range is.
        body = dart.ppf(np.linspace(0.001, 0.999, 33))
        pts = np.concatenate([np.linspace(lo, hi, n_pts), body])
    re = integrate(lambda x: integrand(x, np.real), pts, abs_tol=abs_tol, max_evals=2_000_000)
    im = integrate(lambda x: integrand(x, np.imag), pts, abs_tol=abs_tol, max_evals=2_000_000)
    value = complex(re.value, im.value)
    if isinstance(dart, TentCF1D):
        value += complex(dart.tail_cf(t, hi))
    return value, re.err_est + im.err_est + tail_err
