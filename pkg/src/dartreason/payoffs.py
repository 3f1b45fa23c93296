"""Payoff functions.

Every payoff is bounded above, evaluates vectorised (1-D: shape (n,), 2-D:
shape (n, 2)), and exposes the metadata the engines rely on: discontinuity
and kink locations (``knots``), isolated peaks (``hotspots``), a box outside
which nothing interesting happens (``region``) and a period, if any.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .darts import Atomic, GridUniform1D, UnsupportedOperation


class ConstructionUnavailable(ValueError):
    """The requested counterexample payoff cannot be built for this dart."""


class Payoff:
    dim: int | None = 1
    period: float | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0 or (self.dim == 2 and x.ndim == 1)
        if self.dim == 2:
            x = np.atleast_2d(x)
        else:
            x = np.atleast_1d(x)
        out = np.asarray(self._eval(x), dtype=float)
        return float(out.reshape(-1)[0]) if scalar else out

    def _eval(self, x):
        raise NotImplementedError

    @property
    def sup_bound(self) -> float:
        raise NotImplementedError

    @property
    def inf_bound(self) -> float:
        raise NotImplementedError

    def knots(self, lo, hi):
        """Points in [lo, hi] where a 1-D payoff jumps or kinks."""
        return np.empty(0)

    def hotspots(self):
        """Isolated maxima worth aligning dart atoms with."""
        return []

    def region(self):
        """(lo, hi) box per coordinate holding all structure, or None."""
        return None


def eval_payoff(payoff: Payoff, x):
    return payoff(x)


@dataclass(frozen=True)
class Cosine(Payoff):
    """cos(w . x); ``direction=None`` means the all-ones vector in any dim."""

    direction: tuple | None = None

    @property
    def dim(self):
        return None if self.direction is None else len(self.direction)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.direction is None:
            s = x if x.ndim <= 1 else x.sum(axis=-1)
        elif len(self.direction) == 1:
            s = self.direction[0] * x
        else:
            s = x @ np.array(self.direction)
        out = np.cos(s)
        return float(out) if np.ndim(out) == 0 else out

    def weights(self, dim):
        return np.ones(dim) if self.direction is None else np.array(self.direction)

    @property
    def period(self):
        # One coordinate with the largest weight already sweeps a full cycle.
        w = 1.0 if self.direction is None else max(abs(v) for v in self.direction)
        return 2 * math.pi / w

    sup_bound = 1.0
    inf_bound = -1.0


@dataclass(frozen=True)
class SquareWave(Payoff):
    """1 on [2k, 2k+1], 0 on (2k-1, 2k)."""

    period = 2.0
    sup_bound = 1.0
    inf_bound = 0.0

    def _eval(self, x):
        fl = np.floor(x)
        odd_integer = (x == fl) & (np.mod(fl, 2) == 1)
        return np.where((np.mod(fl, 2) == 0) | odd_integer, 1.0, 0.0)

    def knots(self, lo, hi):
        return np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=float)

    def region(self):
        return ((0.0, 2.0),)


@dataclass(frozen=True)
class Comb(Payoff):
    """Blocks of narrow unit tents at 2m + j/m, j = 0..m, m = 1..m_max."""

    k: int
    m_max: int
    sup_bound = 1.0
    inf_bound = 0.0

    def __post_init__(self):
        if self.k < 1 or self.m_max < self.k:
            raise ValueError("Comb needs 1 <= k <= m_max")

    def _teeth(self):
        centers, widths = [], []
        for m in range(1, self.m_max + 1):
            for j in range(m + 1):
                centers.append(2 * m + j / m)
                widths.append(0.1 / (m + 1))
        return np.array(centers), np.array(widths)

    def _eval(self, x):
        c, w = self._teeth()
        tents = np.clip(1.0 - np.abs(x[:, None] - c[None, :]) / w[None, :], 0.0, None)
        return tents.max(axis=1)

    def knots(self, lo, hi):
        c, w = self._teeth()
        pts = np.concatenate([c - w, c, c + w])
        return np.sort(pts[(pts >= lo) & (pts <= hi)])

    def hotspots(self):
        return [(float(c),) for c in self._teeth()[0]]

    def region(self):
        return ((2 - 0.1, 2 * self.m_max + 1.1),)


@dataclass(frozen=True)
class BoardGeometry:
    bullseye_r: float = 6.35
    bull_r: float = 16.0
    treble_in: float = 99.0
    treble_out: float = 107.0
    double_in: float = 162.0
    double_out: float = 170.0
    sector_numbers: tuple = (6, 13, 4, 18, 1, 20, 5, 12, 9, 14, 11, 8, 16, 7, 19, 3, 17, 2, 15, 10)
    bull_value: int = 25
    bullseye_value: int = 50

    def __post_init__(self):
        radii = self.radii()
        if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
            raise ValueError("board radii must be strictly increasing")
        if sorted(self.sector_numbers) != list(range(1, 21)):
            raise ValueError("sector numbers must be a permutation of 1..20")

    def radii(self):
        return (self.bullseye_r, self.bull_r, self.treble_in, self.treble_out,
                self.double_in, self.double_out)

    def sector_index(self, x, y):
        # Sector k spans (18k - 9, 18k + 9] degrees.
        theta = np.degrees(np.arctan2(y, x)) % 360.0
        return np.ceil((theta - 9.0) / 18.0).astype(int) % 20

    def sector(self, x, y):
        return np.asarray(self.sector_numbers)[self.sector_index(x, y)]

    def multiplier(self, r):
        # Rings contain their inner boundary: [r_in, r_out).
        return np.select(
            [r < self.treble_in, r < self.treble_out, r < self.double_in, r < self.double_out],
            [1, 3, 1, 2], default=0)

    def score(self, x, y):
        r = np.hypot(x, y)
        s = self.sector(x, y) * self.multiplier(r)
        s = np.where(r < self.bull_r, self.bull_value, s)
        return np.where(r < self.bullseye_r, self.bullseye_value, s).astype(float)

    def label(self, x, y):
        """Region name of a point: 'bullseye', 'bull' or the sector number."""
        r = math.hypot(x, y)
        if r < self.bullseye_r:
            return "bullseye"
        if r < self.bull_r:
            return "bull"
        return str(int(self.sector(np.array(x), np.array(y))))


STANDARD_BOARD = BoardGeometry()


@dataclass(frozen=True)
class Dartboard(Payoff):
    geometry: BoardGeometry = STANDARD_BOARD
    dim = 2
    sup_bound = 60.0
    inf_bound = 0.0

    def _eval(self, x):
        return self.geometry.score(x[:, 0], x[:, 1])

    def hotspots(self):
        """Board centre and the middle of every treble and double segment."""
        g = self.geometry
        out = [(0.0, 0.0)]
        for k in range(20):
            th = math.radians(18.0 * k)
            for r in (0.5 * (g.treble_in + g.treble_out), 0.5 * (g.double_in + g.double_out)):
                out.append((r * math.cos(th), r * math.sin(th)))
        return out

    def region(self):
        r = self.geometry.double_out
        return ((-r, r), (-r, r))


@dataclass(frozen=True)
class BoardSlice(Payoff):
    """The dartboard along the line through the centre at angle ``angle_deg``."""

    angle_deg: float = 90.0
    geometry: BoardGeometry = STANDARD_BOARD
    sup_bound = 60.0
    inf_bound = 0.0

    def _eval(self, s):
        th = math.radians(self.angle_deg)
        return self.geometry.score(s * math.cos(th), s * math.sin(th))

    def knots(self, lo, hi):
        r = np.array(self.geometry.radii())
        pts = np.concatenate([-r, [0.0], r])
        return pts[(pts >= lo) & (pts <= hi)]

    def region(self):
        r = self.geometry.double_out
        return ((-r, r),)


@dataclass(frozen=True)
class KDelta(Payoff):
    """Tent of half-width delta at 0 and a plateau p0/2 beyond |x| = 1."""

    delta: float
    p0: float
    sup_bound = 1.0
    inf_bound = 0.0

    def __post_init__(self):
        if not 0 < self.delta < 0.5:
            raise ValueError("KDelta needs 0 < delta < 1/2")
        if not 0 < self.p0 <= 1:
            raise ValueError("KDelta needs 0 < p0 <= 1")

    def _eval(self, x):
        a = np.abs(x)
        d = self.delta
        h = self.p0 / 2.0
        return np.select(
            [a <= d, a < 1 - d, a <= 1],
            [1 - a / d, 0.0, h * (a / d + 1 - 1 / d)], default=h)

    def knots(self, lo, hi):
        d = self.delta
        pts = np.array([-1, -1 + d, -d, 0, d, 1 - d, 1], dtype=float)
        return pts[(pts >= lo) & (pts <= hi)]

    def hotspots(self):
        return [(0.0,)]

    def region(self):
        return ((-1.0, 1.0),)


@dataclass(frozen=True)
class AtomStep(Payoff):
    """``peak`` exactly at ``center``, ``outer`` beyond ``radius``, else 0."""

    center: float
    peak: float
    radius: float
    outer: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("AtomStep radius must be positive")

    @property
    def sup_bound(self):
        return max(self.peak, self.outer, 0.0)

    @property
    def inf_bound(self):
        return min(self.peak, self.outer, 0.0)

    def _eval(self, x):
        dx = x - self.center
        return np.where(dx == 0, self.peak, np.where(np.abs(dx) > self.radius, self.outer, 0.0))

    def knots(self, lo, hi):
        c, r = self.center, self.radius
        pts = np.array([c - r, c, c + r])
        return pts[(pts >= lo) & (pts <= hi)]

    def hotspots(self):
        return [(self.center,)]

    def region(self):
        return ((self.center - self.radius - 1, self.center + self.radius + 1),)


@dataclass(frozen=True)
class SingularAtom(AtomStep):
    """2/p on the atom, 1 outside [atom - 2, atom + 2], 0 otherwise."""

    center: float = field(init=False)
    peak: float = field(init=False)
    radius: float = field(init=False, default=2.0)
    outer: float = field(init=False, default=1.0)
    atom: float = 0.0
    p: float = 0.5

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("SingularAtom needs 0 < p <= 1")
        object.__setattr__(self, "center", float(self.atom))
        object.__setattr__(self, "peak", 2.0 / self.p)


def point_step():
    """1 at the origin, 0 on 0 < |x| <= 1, 1/2 beyond."""
    return AtomStep(0.0, 1.0, 1.0, 0.5)


@dataclass(frozen=True)
class GaussBump(Payoff):
    center: tuple
    width: float
    sup_bound = 1.0
    inf_bound = 0.0

    def __post_init__(self):
        c = self.center
        c = tuple(float(v) for v in c) if isinstance(c, (tuple, list)) else (float(c),)
        object.__setattr__(self, "center", c)
        if not self.width > 0:
            raise ValueError("GaussBump width must be positive")

    @property
    def dim(self):
        return len(self.center)

    def _eval(self, x):
        c = np.array(self.center)
        d2 = (x - c[0]) ** 2 if self.dim == 1 else ((x - c) ** 2).sum(axis=1)
        return np.exp(-0.5 * d2 / self.width**2)

    def hotspots(self):
        return [self.center]

    def region(self):
        r = 10.0 * self.width
        return tuple((c - r, c + r) for c in self.center)


@dataclass(frozen=True)
class PiecewiseLinear1D(Payoff):
    """Linear interpolation through (x, y) knots, constant outside."""

    points: tuple

    def __post_init__(self):
        pts = tuple(sorted((float(x), float(y)) for x, y in self.points))
        if len(pts) < 2 or len({x for x, _ in pts}) != len(pts):
            raise ValueError("need at least two distinct knots")
        object.__setattr__(self, "points", pts)

    @property
    def sup_bound(self):
        return max(y for _, y in self.points)

    @property
    def inf_bound(self):
        return min(y for _, y in self.points)

    def _eval(self, x):
        xs, ys = zip(*self.points)
        return np.interp(x, xs, ys)

    def knots(self, lo, hi):
        xs = np.array([x for x, _ in self.points])
        return xs[(xs >= lo) & (xs <= hi)]

    def region(self):
        return ((self.points[0][0], self.points[-1][0]),)


@dataclass(frozen=True)
class Truncated(Payoff):
    """inner(x) * h_B(|x|): h_B is 1 up to B, 0 from B + 1, linear between."""

    inner: Payoff
    B: float

    def __post_init__(self):
        if not self.B > 0:
            raise ValueError("truncation radius must be positive")

    @property
    def dim(self):
        return self.inner.dim

    @property
    def sup_bound(self):
        return max(self.inner.sup_bound, 0.0)

    @property
    def inf_bound(self):
        return min(self.inner.inf_bound, 0.0)

    def _cutoff(self, x):
        r = np.abs(x) if x.ndim == 1 else np.linalg.norm(x, axis=1)
        return np.clip(self.B + 1.0 - r, 0.0, 1.0)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        vals = np.asarray(self.inner(x_arr), dtype=float)
        flat = np.atleast_1d(x_arr) if (self.dim != 2) else np.atleast_2d(x_arr)
        out = vals * self._cutoff(flat).reshape(vals.shape)
        return float(out) if out.ndim == 0 else out

    def knots(self, lo, hi):
        b = self.B
        own = np.array([-b - 1, -b, b, b + 1])
        inner = self.inner.knots(max(lo, -b - 1), min(hi, b + 1))
        pts = np.concatenate([inner, own])
        return np.unique(pts[(pts >= lo) & (pts <= hi)])

    def hotspots(self):
        return self.inner.hotspots()

    def region(self):
        r = self.B + 1.0
        return tuple((-r, r) for _ in range(self.dim or 1))


def truncate(payoff: Payoff, B: float) -> Truncated:
    if payoff.inf_bound < 0:
        raise ValueError("truncate needs a nonnegative payoff; shift it first")
    return Truncated(payoff, float(B))


@dataclass(frozen=True)
class ZeroConstruct(Payoff):
    """Bounded continuous modification h of f(x) = exp(c x) cos(omega x).

    h = f on |x| <= |a0| + B, h = -sup from |a0| + 2B, linear blend
    towards -sup in between.
    """

    omega: float
    c: float
    a0: float
    B: float
    sup: float

    def __post_init__(self):
        if self.omega == 0:
            raise ValueError("omega must be nonzero")
        if not self.B > 0:
            raise ValueError("B must be positive")

    @property
    def sup_bound(self):
        return self.sup

    @property
    def inf_bound(self):
        return -self.sup

    def raw(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(self.c * x) * np.cos(self.omega * x)

    def _eval(self, x):
        inner = abs(self.a0) + self.B
        ax = np.abs(x)
        # Evaluate f only where it is used, to avoid overflow far out.
        f = self.raw(np.clip(x, -inner - self.B, inner + self.B))
        blend = (ax - inner) / self.B * (-f - self.sup_bound) + f
        return np.where(ax <= inner, f, np.where(ax <= inner + self.B, blend, -self.sup_bound))

    def knots(self, lo, hi):
        inner = abs(self.a0) + self.B
        pts = np.array([-inner - self.B, -inner, inner, inner + self.B])
        return pts[(pts >= lo) & (pts <= hi)]

    def region(self):
        r = abs(self.a0) + 2 * self.B
        return ((-r, r),)


def complex_zeros(dart, n_max=8):
    """Zeros z = omega - i c (omega != 0) of the entire cf of an atomic dart.

    Lattice-supported atoms reduce to polynomial roots; otherwise Newton
    iterations are run from a grid of starting points.
    """
    if isinstance(dart, GridUniform1D):
        dart = dart.as_atomic()
    if not isinstance(dart, Atomic) or dart.dim != 1:
        raise UnsupportedOperation("complex zeros need a 1-D Atomic dart")
    xs = np.array([x[0] for x in dart.locations])
    ms = np.array(dart.masses)
    if xs.size < 2:
        return []
    x0 = xs.min()
    gaps = xs - x0
    h = gaps[gaps > 0].min()
    steps = gaps / h
    zeros = []
    if np.all(np.abs(steps - np.round(steps)) < 1e-9) and steps.max() <= 400:
        n = np.round(steps).astype(int)
        coeffs = np.zeros(n.max() + 1)
        np.add.at(coeffs, n, ms)
        for w in np.roots(coeffs[::-1]):
            # exp(i z h) = w  =>  z = (arg w - i log|w|) / h
            arg = np.angle(w)
            for k in (0, 1, -1):
                z = complex(arg + 2 * np.pi * k, -np.log(abs(w))) / h
                if abs(z.real) > 1e-12:
                    zeros.append(z)
                    break
    else:
        scale = np.ptp(xs)
        for re in np.linspace(0.5, 12.0, 24) / scale:
            for im in np.linspace(-4.0, 4.0, 9) / scale:
                z = complex(re, im)
                for _ in range(100):
                    # Newton can wander off to where exp overflows; give up there.
                    if not abs(z.imag) * np.abs(xs).max() < 500:
                        break
                    e = np.exp(1j * z * xs) * ms
                    fz, dfz = e.sum(), (1j * xs * e).sum()
                    if dfz == 0:
                        break
                    step = fz / dfz
                    z -= step
                    if abs(step) < 1e-15 * max(1.0, abs(z)):
                        break
                if not abs(z.imag) * np.abs(xs).max() < 500:
                    continue
                if abs(dart.cf_complex(z)) < 1e-10 and abs(z.real) > 1e-9:
                    if all(abs(z - w) > 1e-7 for w in zeros):
                        zeros.append(z)
    zeros.sort(key=lambda z: (abs(z), z.real))
    return zeros[:n_max]


def make_zero_construct(dart) -> ZeroConstruct:
    """Bounded continuous payoff h with E h(a + X) <= 0 for every aim but
    E h(a0 + d0 X) > 0 for some d0 > 1."""
    try:
        zeros = complex_zeros(dart)
    except UnsupportedOperation as exc:
        raise ConstructionUnavailable(str(exc)) from exc
    if isinstance(dart, GridUniform1D):
        dart = dart.as_atomic()
    for z0 in zeros:
        omega, c = z0.real, -z0.imag
        for d0 in (2.0, 1.5, 3.0, 1.25, 4.0):
            phi = dart.cf_complex(d0 * z0)
            if abs(phi) > 1e-6:
                a0 = -np.angle(phi) / omega
                if abs(a0) < 1e-15:
                    a0 = 0.0
                B = d0 * max(abs(x[0]) for x in dart.locations)
                inner = abs(a0) + 10 * B
                y = np.linspace(-inner, inner, 100_001)
                sup = 1.01 * float(np.max(np.abs(np.exp(c * y) * np.cos(omega * y))))
                return ZeroConstruct(float(omega), float(c), float(a0), float(B), sup)
    raise ConstructionUnavailable("cf has no usable complex zero (degenerate dart?)")


def make_comb(k: int, m_max: int) -> Comb:
    return Comb(int(k), int(m_max))
