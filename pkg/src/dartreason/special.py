"""Bessel functions of the first kind, orders 0 and 1.

Power series near the origin and the Hankel asymptotic expansion further
out.  Accurate to about 1e-12 absolute on |x| <= 50.
"""

import math

import numpy as np

SERIES_LIMIT = 12.0
MAX_ARG = 50.0


def _series(order, x):
    half = x / 2.0
    term = half**order / math.factorial(order)
    total = term
    q = -half * half
    k = 0
    while abs(term) > 1e-17 * max(1.0, abs(total)) or k < 3:
        k += 1
        term *= q / (k * (k + order))
        total += term
    return total


def _asymptotic(order, x):
    # P and Q series of the Hankel expansion; stop at the smallest term.
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    term = 1.0
    last = math.inf
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= last or abs(term) < 1e-17:
            break
        last = abs(term)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 else term
    chi = x - (0.5 * order + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def _bessel_scalar(order, x):
    sign = 1.0
    if x < 0:
        x = -x
        sign = -1.0 if order == 1 else 1.0
    if x < SERIES_LIMIT:
        return sign * _series(order, x)
    return sign * _asymptotic(order, x)


def bessel_j(order, x):
    """J_order(x) for order in {0, 1} and |x| <= 50.

    Accepts scalars or arrays; raises ValueError outside that range.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > MAX_ARG):
        raise ValueError(f"bessel_j supports |x| <= {MAX_ARG}")
    if arr.ndim == 0:
        return _bessel_scalar(order, float(arr))
    flat = [_bessel_scalar(order, float(v)) for v in arr.ravel()]
    return np.array(flat).reshape(arr.shape)


def jinc(x):
    """2 J_1(x) / x with the removable singularity filled in."""
    x = float(x)
    if abs(x) < 1e-8:
        return 1.0 - x * x / 8.0
    return 2.0 * bessel_j(1, x) / x


def first_positive_zero(fn, step=0.5, x_max=MAX_ARG, tol=1e-13, start=0.0):
    """First sign change of ``fn`` on (start, x_max], refined by bisection.

    ``step`` is the bracket width of the initial scan.
    """
    lo = start if start > 0 else step
    f_lo = fn(lo)
    while lo < x_max:
        hi = min(lo + step, x_max)
        f_hi = fn(hi)
        if f_lo == 0.0:
            return lo
        if f_lo * f_hi < 0:
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                f_mid = fn(mid)
                if f_lo * f_mid <= 0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
            return 0.5 * (lo + hi)
        lo, f_lo = hi, f_hi
    raise ValueError("no sign change found")
