"""Maximising E f(a + dX) over the aim, g-curves and the dartboard sweep."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve

from .darts import Affine, Atomic, Dart, UniformDisc2D, UnsupportedOperation, make_rng
from .expectation import EvalSpec, atom_table, expect
from .payoffs import STANDARD_BOARD, Cosine, Dartboard, Payoff

STATUSES = ("converged", "budget", "flat")
N_GRID = 64
N_REFINE = 4
N_FLAT_PROBES = 5
STEP_FRACTION = 1e-3
POLISH_DEPTH = 16


@dataclass
class AimResult:
    d: float
    aim: tuple
    g: float
    err_est: float
    status: str
    n_evals: int = 0
    label: str | None = None


@dataclass
class GCurve:
    d_grid: list
    points: list
    increases: list
    aim_jumps: list = field(default_factory=list)

    @property
    def g(self):
        return np.array([p.g for p in self.points])


# -- helpers -------------------------------------------------------------------

def _atomic_locations(dart):
    """Atom locations of the purely atomic parts of a dart (possibly none)."""
    from .darts import IndepSum, Mixture
    if dart.is_atomic:
        try:
            return atom_table(dart)[0]
        except UnsupportedOperation:
            return np.empty((0, dart.dim))
    if isinstance(dart, Mixture):
        parts = [_atomic_locations(c) for _, c in dart.components]
        return np.concatenate(parts) if parts else np.empty((0, dart.dim))
    if isinstance(dart, Affine):
        locs = _atomic_locations(dart.inner)
        return dart.scale * locs + np.array(dart.shift)
    if isinstance(dart, IndepSum):
        return np.empty((0, dart.dim))
    return np.empty((0, dart.dim))


def default_search_box(dart: Dart, payoff: Payoff, d: float):
    """Box of aims holding everything the payoff can offer at distance d."""
    dim = dart.dim
    period = payoff.period
    if period is not None:
        return tuple((0.0, float(period)) for _ in range(dim))
    reach = d * dart.radius()
    region = payoff.region()
    if region is None:
        return tuple((-reach - 10.0, reach + 10.0) for _ in range(dim))
    box = []
    for lo, hi in region:
        pad = 1.05 * reach + 0.1 * (hi - lo) + 1e-9
        box.append((lo - pad, hi + pad))
    return tuple(box)


def _check_box(box, dim):
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box) != dim:
        raise ValueError(f"search box needs {dim} interval(s)")
    for lo, hi in box:
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("search box must be bounded")
        if not hi > lo:
            raise ValueError("search box is empty")
    return box


def _disc_form(dart):
    """(scale, shift) when dart = scale * UniformDisc2D + shift, else None."""
    scale, shift = 1.0, np.zeros(2)
    while isinstance(dart, Affine):
        shift = shift + scale * np.array(dart.shift)
        scale = scale * dart.scale
        dart = dart.inner
    if isinstance(dart, UniformDisc2D):
        return scale, shift
    return None


class _Objective:
    """Counts evaluations and memoises aims already visited."""

    def __init__(self, dart, payoff, d, spec):
        self.dart, self.payoff, self.d, self.spec = dart, payoff, d, spec
        self.cache = {}
        self.n_evals = 0

    def __call__(self, aim):
        key = tuple(np.round(np.asarray(aim, dtype=float), 15))
        if key not in self.cache:
            r = expect(self.dart, self.payoff, np.array(key), self.d, self.spec)
            self.n_evals += r.n_evals
            self.cache[key] = r
        return self.cache[key]


def _pattern_search(obj, x0, step, lo, hi, min_step):
    """Compass search maximising obj(x).value inside [lo, hi]."""
    x = np.array(x0, dtype=float)
    fx = obj(x).value
    step = np.array(step, dtype=float)
    while np.any(step >= min_step):
        moved = False
        for i in range(x.size):
            if step[i] < min_step[i]:
                continue
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] = min(max(y[i] + sign * step[i], lo[i]), hi[i])
                if y[i] == x[i]:
                    continue
                fy = obj(y).value
                if fy > fx + 1e-15:
                    x, fx, moved = y, fy, True
                    break
        if not moved:
            step = step / 2
    return x


def _grid_candidates(box, n_grid):
    axes = [np.linspace(lo, hi, n_grid) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _support_edges(dart):
    """Finite support endpoints of the 1-D density parts of a dart."""
    from .darts import Mixture, _Continuous1D
    if isinstance(dart, _Continuous1D):
        return [x for x in dart.support() if math.isfinite(x)]
    if isinstance(dart, Mixture):
        return [x for _, c in dart.components for x in _support_edges(c)]
    if isinstance(dart, Affine):
        return [dart.scale * x + dart.shift[0] for x in _support_edges(dart.inner)]
    return []


def _alignment_candidates(dart, payoff, d, box):
    """Aims that put a dart atom exactly on a payoff hotspot or 1-D knot, or
    a support edge of a 1-D dart on a knot."""
    locs = _atomic_locations(dart)
    spots = list(payoff.hotspots())
    region = payoff.region()
    if dart.dim == 1 and region is not None:
        knots = [(float(k),) for k in payoff.knots(*region[0])]
        spots += knots
        edges = _support_edges(dart)
        if edges and knots:
            locs = np.concatenate([locs.reshape(-1, 1), np.array(edges).reshape(-1, 1)])
    if locs.size == 0:
        return np.empty((0, dart.dim))
    if not spots:
        return np.empty((0, dart.dim))
    spots = np.array(spots, dtype=float).reshape(-1, dart.dim)
    cands = (spots[:, None, :] - d * locs[None, :, :]).reshape(-1, dart.dim)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return cands[np.all((cands >= lo) & (cands <= hi), axis=1)]


def _screen_spec(spec):
    return replace(spec, abs_tol=max(spec.abs_tol, 1e-4),
                   max_evals=min(spec.max_evals, 200_000),
                   n_r=min(spec.n_r, 96), n_theta=min(spec.n_theta, 192))


def _disc_screen(payoff, radius, offset, box, n_keep):
    """Smooth the rasterised payoff with the disc kernel by FFT and return the
    best separated local maxima as aim candidates."""
    h = float(np.clip(radius / 20.0, 0.25, 2.0))
    k = int(math.ceil(radius / h))
    lo = np.array([b[0] for b in box]) + offset
    hi = np.array([b[1] for b in box]) + offset
    xs = np.arange(lo[0] - k * h, hi[0] + (k + 1) * h, h)
    ys = np.arange(lo[1] - k * h, hi[1] + (k + 1) * h, h)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    board = payoff(np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(X.shape)
    # Disc coverage per kernel cell from 4x4 supersampling.
    sub = (np.arange(4) + 0.5) / 4 - 0.5
    off = np.arange(-k, k + 1) * h
    px = (off[:, None] + h * sub[None, :]).ravel()
    inside = (px[:, None] ** 2 + px[None, :] ** 2) <= radius**2
    kernel = inside.reshape(2 * k + 1, 4, 2 * k + 1, 4).mean(axis=(1, 3))
    if kernel.sum() == 0:
        kernel[k, k] = 1.0
    kernel /= kernel.sum()
    smooth = fftconvolve(board, kernel, mode="same")
    inner = smooth[k:-k or None, k:-k or None] if k else smooth
    gx, gy = xs[k:xs.size - k], ys[k:ys.size - k]
    peaks = inner == ndimage.maximum_filter(inner, size=max(3, 2 * (k // 4) + 1), mode="nearest")
    idx = np.argwhere(peaks)
    vals = inner[peaks]
    order = np.argsort(-vals, kind="stable")
    chosen = []
    sep = max(radius / 2, 2 * h)
    for j in order:
        p = np.array([gx[idx[j, 0]], gy[idx[j, 1]]])
        if all(np.hypot(*(p - q)) > sep for q in chosen):
            chosen.append(p)
        if len(chosen) >= n_keep:
            break
    return np.array(chosen) - offset, h


# -- public API ------------------------------------------------------------------

def cos_aim(dart: Dart, payoff: Cosine, d: float) -> AimResult:
    """Analytic optimum for cos(w.x): g = |phi(d w)| at w.a = -Arg phi(d w)."""
    w = payoff.weights(dart.dim)
    phi = dart.cf(d * w if dart.dim == 2 else d * w[0])
    g = abs(phi)
    aim = -np.angle(phi) * w / float(w @ w)
    err = 1e-12
    status = "flat" if g <= err else "converged"
    return AimResult(float(d), tuple(float(v) for v in aim), float(g), err, status, 1)


def best_aim(dart: Dart, payoff: Payoff, d: float, spec: EvalSpec = EvalSpec(),
             search_box=None, n_grid: int = N_GRID, use_closed_form: bool = True) -> AimResult:
    """Approximate sup_a E f(a + dX) by multistart screening and pattern search."""
    if not d > 0:
        raise ValueError("d must be positive")
    if payoff.dim is not None and payoff.dim != dart.dim:
        raise ValueError(f"dart is {dart.dim}-D but payoff is {payoff.dim}-D")
    if use_closed_form and isinstance(payoff, Cosine):
        try:
            return cos_aim(dart, payoff, d)
        except UnsupportedOperation:
            pass
    dim = dart.dim
    box = _check_box(search_box if search_box is not None
                     else default_search_box(dart, payoff, d), dim)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    width = hi - lo
    screen = _Objective(dart, payoff, d, _screen_spec(spec))

    disc = _disc_form(dart) if dim == 2 else None
    if disc is not None and payoff.dim == 2:
        scale, shift = disc
        cands, h = _disc_screen(payoff, d * scale, d * shift, box, 2 * N_REFINE)
        spots = _alignment_candidates(Atomic.point(tuple(shift)), payoff, d, box)
        cands = np.concatenate([cands, spots])
        vals = np.array([screen(c).value for c in cands])
        order = np.argsort(-vals, kind="stable")
        starts = [cands[i] for i in order[:N_REFINE]]
        step = np.full(dim, h)
    else:
        n_axis = n_grid if dim == 1 else max(8, n_grid // 4)
        cands = np.concatenate([_grid_candidates(box, n_axis),
                                _alignment_candidates(dart, payoff, d, box)])
        vals = np.array([screen(c).value for c in cands])
        order = np.argsort(-vals, kind="stable")
        starts = [cands[i] for i in order[:N_REFINE]]
        step = width / n_axis

    min_step = STEP_FRACTION * width
    refined = [_pattern_search(screen, s, step, lo, hi, min_step) for s in starts]
    final = _Objective(dart, payoff, d, spec)
    results = [(final(x).value, i) for i, x in enumerate(refined)]
    # Polish the winner on the accurate objective; screening noise can stop
    # the coarse search a few steps short.
    best_x = _pattern_search(final, refined[max(results)[1]], 4 * min_step, lo, hi,
                             min_step / POLISH_DEPTH)
    best_r = final(best_x)
    n_evals = screen.n_evals + final.n_evals

    rng = make_rng(spec.seed, (7,))
    probes = [final(lo + width * rng.random(dim)) for _ in range(N_FLAT_PROBES)]
    n_evals = screen.n_evals + final.n_evals
    if any(p.value > best_r.value for p in probes):
        best_r = max(probes, key=lambda p: p.value)
        best_x = np.array([k for k, v in final.cache.items() if v is best_r][0])
    flat = all(abs(p.value - best_r.value) <= best_r.err_est + p.err_est + 1e-12 for p in probes)
    if not best_r.converged:
        status = "budget"
    elif flat:
        status = "flat"
    else:
        status = "converged"
    return AimResult(float(d), tuple(float(v) for v in best_x), best_r.value,
                     best_r.err_est, status, n_evals)


def find_increases(d_grid, points, tol):
    """Consecutive grid pairs where g rises by more than the combined error."""
    out = []
    for (di, pi), (dj, pj) in zip(zip(d_grid, points), zip(d_grid[1:], points[1:])):
        margin = 1e-9 + tol + pi.err_est + pj.err_est
        if pj.g > pi.g + margin:
            out.append((float(di), float(dj), float(pj.g - pi.g)))
    return out


def _check_grid(d_grid):
    grid = [float(v) for v in d_grid]
    if not grid:
        raise ValueError("d grid is empty")
    if any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("d grid must be positive and strictly increasing")
    return grid


def _parallel_map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def g_curve(dart: Dart, payoff: Payoff, d_grid, spec: EvalSpec = EvalSpec(),
            threads: int = 1, search_box=None, use_closed_form: bool = True) -> GCurve:
    grid = _check_grid(d_grid)

    def one(d):
        return best_aim(dart, payoff, d, spec, search_box=search_box,
                        use_closed_form=use_closed_form)

    points = _parallel_map(one, grid, threads)
    return GCurve(grid, points, find_increases(grid, points, spec.abs_tol))


def find_aim_jumps(points, min_jump):
    out = []
    for p, q in zip(points, points[1:]):
        dist = float(np.hypot(*(np.array(q.aim) - np.array(p.aim))))
        if dist > min_jump:
            out.append((p.d, q.d, dist))
    return out


DARTBOARD_SPEC = EvalSpec(abs_tol=0.02)


def dartboard_sweep(r_grid, spec: EvalSpec = DARTBOARD_SPEC, threads: int = 1,
                    board: Dartboard = Dartboard(), min_jump: float = 10.0) -> GCurve:
    """Best aim for a uniform disc of radius r on the board, for each r.

    Points carry the board region of the best aim as ``label``; aim jumps are
    consecutive radii whose best aims lie more than ``min_jump`` mm apart.
    """
    grid = _check_grid(r_grid)
    if grid[-1] > 400:
        raise ValueError("radii must lie in (0, 400] mm")
    geom = board.geometry
    dart = UniformDisc2D()

    def one(r):
        reach = geom.double_out + r
        p = best_aim(dart, board, r, spec, search_box=((-reach, reach), (-reach, reach)))
        p.label = geom.label(*p.aim)
        return p

    points = _parallel_map(one, grid, threads)
    return GCurve(grid, points, find_increases(grid, points, spec.abs_tol),
                  find_aim_jumps(points, min_jump))


__all__ = ["AimResult", "GCurve", "best_aim", "cos_aim", "g_curve", "dartboard_sweep",
           "default_search_box", "find_increases", "find_aim_jumps", "STANDARD_BOARD"]
