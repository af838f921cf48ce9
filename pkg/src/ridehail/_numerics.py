"""Small scalar solvers used throughout the package."""

import math

import numpy as np
from scipy import optimize

from .errors import MonotonicityError, NumericalError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def root_decreasing(fun, lo, hi, xtol=1e-12, samples=20):
    """Zero of a strictly decreasing function on ``[lo, hi]``.

    The decrease is spot-checked on ``samples`` points before bisecting.
    Requires ``fun(lo) >= 0 >= fun(hi)``.
    """
    if samples:
        xs = np.linspace(lo, hi, samples)
        vals = np.array([fun(x) for x in xs])
        if np.any(np.diff(vals) > 1e-12 * max(1.0, np.max(np.abs(vals)))):
            raise MonotonicityError("function is not decreasing on the sampled grid")
    f_lo, f_hi = fun(lo), fun(hi)
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if not (f_lo > 0.0 > f_hi):
        raise NumericalError("root is not bracketed")
    return float(optimize.bisect(fun, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))


def golden_max(fun, lo, hi, tol=1e-10, max_iter=200):
    """Maximiser of a unimodal function on ``[lo, hi]`` by golden-section search.

    Returns ``(x, fun(x))``; the endpoints are compared with the interior result
    so that monotone functions resolve to the correct boundary.
    """
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fun(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for x in (float(lo), float(hi)):
        fx = fun(x)
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def golden_min(fun, lo, hi, tol=1e-10, max_iter=200):
    x, neg = golden_max(lambda t: -fun(t), lo, hi, tol=tol, max_iter=max_iter)
    return x, -neg
