"""Wardrop splits of the passenger stream between two platforms.

Passengers split ``Lambda = lambda1 + lambda2`` so that the quality of service
``Q_i`` (unavailability, blocking or pick-up delay) is balanced:
``lambda1`` minimises ``(Q1(lambda1) - Q2(Lambda - lambda1))^2``.

For ``beta > 0`` every metric is strictly increasing in the platform's own
arrival rate and the split is found by bisection. With ``beta = 0`` the split has
closed forms, implemented in :func:`we_idp`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import queueing as q
from ._numerics import golden_min
from .errors import DomainError, MonotonicityError, RegimeError
from .queueing import MarketParams
from .sensitivity import PriceModel, eval_f, eval_f_inverse


class QosMetric(enum.Enum):
    UNAVAILABILITY = "unavailability"
    BLOCKING = "blocking"
    DELAY = "delay"

    @classmethod
    def parse(cls, value) -> "QosMetric":
        if isinstance(value, cls):
            return value
        aliases = {"u": "unavailability", "b": "blocking", "d": "delay"}
        key = str(value).strip().lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise DomainError(f"unknown QoS metric {value!r}") from None


@dataclass(frozen=True)
class WardropSplit:
    lambda1: float
    lambda2: float
    gap: float
    boundary: bool

    def swapped(self) -> "WardropSplit":
        return WardropSplit(self.lambda2, self.lambda1, self.gap, self.boundary)


def _check_metric(params, metric):
    metric = QosMetric.parse(metric)
    if metric is QosMetric.DELAY and not 0 < params.alpha < 1:
        raise DomainError("the delay metric needs alpha in (0, 1)")
    return metric


def qos_from_x(params: MarketParams, metric: QosMetric, x, f):
    """QoS of a platform with accepted-passenger rate ``x = lambda f`` and acceptance ``f``."""
    if metric is QosMetric.UNAVAILABILITY:
        return q._x_unavailability(params, x)
    if metric is QosMetric.BLOCKING or params.alpha == 0:
        return q._x_unavailability(params, x) * f + (1.0 - f)
    return q._x_delay(params, x, f)


def _gap(params, metric, lam_a, f_a, f_b):
    """``Q_a(lam_a) - Q_b(Lambda - lam_a)`` evaluated in a single batched series call."""
    lam_b = params.Lambda - lam_a
    x = np.concatenate([lam_a * f_a, lam_b * f_b])
    fs = np.concatenate([f_a, f_b])
    qv = qos_from_x(params, metric, x, fs)
    n = lam_a.size
    return qv[:n] - qv[n:]


def split_many(params: MarketParams, model: PriceModel, metric, phi_a, phi_b, tol=1e-10, max_iter=200):
    """Vectorised Wardrop split for ``beta > 0``: returns the arrival rate of platform ``a``.

    ``phi_a`` and ``phi_b`` broadcast against each other. Equal prices get exactly
    ``Lambda / 2``. Pairs are canonicalised so that the lower price always plays the
    same role, which makes the result exactly antisymmetric under swapping.
    """
    metric = _check_metric(params, metric)
    if params.beta <= 0:
        raise RegimeError("the bisection split needs beta > 0; use we_idp for beta = 0")
    pa, pb = np.broadcast_arrays(np.asarray(phi_a, dtype=float), np.asarray(phi_b, dtype=float))
    shape = pa.shape
    pa, pb = pa.ravel(), pb.ravel()
    lam_total = params.Lambda
    out = np.full(pa.shape, lam_total / 2.0)
    if lam_total == 0:
        return out.reshape(shape) * 0.0
    flip = pa > pb
    lo_p = np.where(flip, pb, pa)
    hi_p = np.where(flip, pa, pb)
    todo = lo_p != hi_p
    if np.any(todo):
        lam_lo = _bisect_split(params, metric, eval_f(model, lo_p[todo]), eval_f(model, hi_p[todo]), tol, max_iter)
        res = np.where(flip[todo], lam_total - lam_lo, lam_lo)
        out[todo] = res
    return out.reshape(shape)


def _bisect_split(params, metric, f_a, f_b, tol, max_iter):
    lam_total = params.Lambda
    n = f_a.size
    zeros = np.zeros(n)
    g0 = _gap(params, metric, zeros, f_a, f_b)
    g1 = _gap(params, metric, np.full(n, lam_total), f_a, f_b)
    lo = np.zeros(n)
    hi = np.full(n, lam_total)
    at_zero = g0 >= 0
    at_full = (~at_zero) & (g1 <= 0)
    active = ~(at_zero | at_full)
    for _ in range(max_iter):
        if not np.any(active) or np.max(hi[active] - lo[active]) <= tol:
            break
        idx = np.flatnonzero(active & (hi - lo > tol))
        mid = 0.5 * (lo[idx] + hi[idx])
        g = _gap(params, metric, mid, f_a[idx], f_b[idx])
        up = g < 0
        lo[idx[up]] = mid[up]
        hi[idx[~up]] = mid[~up]
    lam = 0.5 * (lo + hi)
    lam[at_zero] = 0.0
    lam[at_full] = lam_total
    return lam


def solve_we(params: MarketParams, model: PriceModel, metric, phi1, phi2, tol=1e-10,
             max_iter=200, check_monotone=True) -> WardropSplit:
    """Wardrop split for ``beta > 0`` by bisection on ``g(l) = Q1(l) - Q2(Lambda - l)``.

    A boundary split is returned when ``g`` keeps one sign on ``[0, Lambda]``.
    """
    metric = _check_metric(params, metric)
    if params.beta <= 0:
        raise RegimeError("solve_we needs beta > 0; use we_idp for beta = 0")
    phi1, phi2 = float(phi1), float(phi2)
    lam_total = params.Lambda
    if phi1 == phi2:
        return WardropSplit(lam_total / 2.0, lam_total / 2.0, 0.0, False)
    if phi1 > phi2:
        return solve_we(params, model, metric, phi2, phi1, tol, max_iter, check_monotone).swapped()
    f1 = np.array([eval_f(model, phi1)])
    f2 = np.array([eval_f(model, phi2)])
    if check_monotone and lam_total > 0:
        grid = np.linspace(0.0, lam_total, 9)
        g = _gap(params, metric, grid, np.repeat(f1, 9), np.repeat(f2, 9))
        if np.any(np.diff(g) < -1e-9):
            raise MonotonicityError("QoS gap is not increasing in lambda1")
    lam1 = float(_bisect_split(params, metric, f1, f2, tol, max_iter)[0])
    gap = abs(float(_gap(params, metric, np.array([lam1]), f1, f2)[0]))
    boundary = lam1 in (0.0, lam_total)
    return WardropSplit(lam1, lam_total - lam1, gap, boundary)


def band_edges(params: MarketParams, model: PriceModel):
    """``(f^-1(2 rho), f^-1(rho))``: the price bands of the blocking split at ``beta = 0``."""
    rho = params.rho
    return eval_f_inverse(model, 2.0 * rho), eval_f_inverse(model, rho)


def idp_blocking_share(params: MarketParams, model: PriceModel, phi_own, phi_opp):
    """Own arrival rate under the blocking split at ``beta = 0``; vectorised.

    The higher-priced platform keeps ``Lambda/2`` below ``f^-1(2 rho)``,
    ``Lambda - e/f`` on ``[f^-1(2 rho), f^-1(rho))`` and nothing above.
    """
    lam_total, e = params.Lambda, params.e
    own, opp = np.broadcast_arrays(np.asarray(phi_own, dtype=float), np.asarray(phi_opp, dtype=float))
    t2, t1 = band_edges(params, model)
    hi = np.maximum(own, opp)
    f_hi = eval_f(model, hi)
    with np.errstate(divide="ignore"):
        mid = lam_total - e / f_hi
    lam_hi = np.where(hi < t2, lam_total / 2.0, np.where(hi < t1, mid, 0.0))
    share = np.where(own > opp, lam_hi, lam_total - lam_hi)
    share = np.where(own == opp, lam_total / 2.0, share)
    return share if share.ndim else float(share)


def alpha_bar(params: MarketParams, model: PriceModel, phi1, phi2) -> float:
    """Delay-weight threshold deciding whether a high-priced platform keeps any demand.

    ``(rho - f1) / ((rho - f2) * sum_{n<=N_bar} (e / (Lambda f2))^n / n)`` for ``phi1 > phi2``.
    Raises ``ZeroDivisionError`` when ``f(phi2) = rho``.
    """
    if not phi1 > phi2:
        raise DomainError("alpha_bar expects phi1 > phi2")
    rho, e, lam_total = params.rho, params.e, params.Lambda
    f1, f2 = eval_f(model, phi1), eval_f(model, phi2)
    u = e / (lam_total * f2)
    series = sum(u**n / n for n in range(1, params.N_bar + 1))
    denom = (rho - f2) * series
    if denom == 0:
        raise ZeroDivisionError("alpha_bar is undefined when f(phi2) equals rho")
    return (rho - f1) / denom


def _delay_idp_gap(params, model, phi1, phi2):
    f1, f2 = eval_f(model, phi1), eval_f(model, phi2)
    lam_total = params.Lambda

    def gap(lam):
        x = np.array([lam * f1, (lam_total - lam) * f2])
        qv = q._x_delay(params, x, np.array([f1, f2]))
        return float(qv[0] - qv[1])

    return gap


def delay_idp_minimiser(params: MarketParams, model: PriceModel, phi1, phi2, tol=1e-10) -> float:
    """Minimiser over ``[0, Lambda]`` of the squared delay gap at ``beta = 0``.

    The gap is non-decreasing in ``lambda1``, so a non-negative gap at 0 (or a
    non-positive gap at ``Lambda``) pins the minimiser to that end; otherwise the
    golden-section search brackets the unique zero.
    """
    gap = _delay_idp_gap(params, model, phi1, phi2)
    lam_total = params.Lambda
    if gap(0.0) >= 0:
        return 0.0
    if gap(lam_total) <= 0:
        return lam_total
    lam, _ = golden_min(lambda t: gap(t) ** 2, 0.0, lam_total, tol=tol)
    return lam


def we_idp(params: MarketParams, model: PriceModel, metric, phi1, phi2) -> WardropSplit:
    """Closed-form Wardrop split at ``beta = 0`` (the ``beta`` field is ignored)."""
    metric = QosMetric.parse(metric)
    phi1, phi2 = float(phi1), float(phi2)
    lam_total = params.Lambda
    if metric is QosMetric.DELAY and params.alpha == 0:
        metric = QosMetric.BLOCKING
    f1, f2 = eval_f(model, phi1), eval_f(model, phi2)
    if metric is QosMetric.UNAVAILABILITY:
        lam1 = lam_total * f2 / (f1 + f2)
        return WardropSplit(lam1, lam_total - lam1, 0.0, False)
    if phi1 == phi2:
        return WardropSplit(lam_total / 2.0, lam_total / 2.0, 0.0, False)
    if phi1 < phi2:
        return we_idp(params, model, metric, phi2, phi1).swapped()
    if metric is QosMetric.BLOCKING:
        lam1 = float(idp_blocking_share(params, model, phi1, phi2))
        gap = abs(_idp_qos_gap(params, model, metric, lam1, phi1, phi2))
        return WardropSplit(lam1, lam_total - lam1, gap, lam1 in (0.0, lam_total))
    lam1 = delay_idp_minimiser(params, model, phi1, phi2)
    _, t1 = band_edges(params, model)
    if phi1 >= t1:
        try:
            if not params.alpha > alpha_bar(params, model, phi1, phi2):
                lam1 = 0.0
        except ZeroDivisionError:
            pass
    gap = abs(_idp_qos_gap(params, model, metric, lam1, phi1, phi2))
    return WardropSplit(lam1, lam_total - lam1, gap, lam1 in (0.0, lam_total))


def _idp_qos_gap(params, model, metric, lam1, phi1, phi2):
    p0 = params.with_(beta=0.0)
    f = np.array([eval_f(model, phi1), eval_f(model, phi2)])
    x = np.array([lam1, params.Lambda - lam1]) * f
    qv = qos_from_x(p0, metric, x, f)
    return float(qv[0] - qv[1])


def payoffs_at_we(params: MarketParams, model: PriceModel, metric, phi1, phi2):
    """Both platforms' revenue rates at the Wardrop split.

    Uses bisection when ``beta > 0`` and the closed forms when ``beta = 0``; in the
    latter case each payoff is ``min(e, lambda_i f_i) * phi_i``.
    """
    if params.beta > 0:
        split = solve_we(params, model, metric, phi1, phi2)
    else:
        split = we_idp(params, model, metric, phi1, phi2)
    return (
        q.revenue_rate(params, model, split.lambda1, phi1),
        q.revenue_rate(params, model, split.lambda2, phi2),
    )


def payoff_against(params: MarketParams, model: PriceModel, metric, phi_own, phi_opp):
    """Own revenue for every own price in ``phi_own`` against ``phi_opp`` (arrays broadcast).

    This is the batched workhorse behind best responses and equilibrium checks.
    """
    metric = QosMetric.parse(metric)
    own, opp = np.broadcast_arrays(np.asarray(phi_own, dtype=float), np.asarray(phi_opp, dtype=float))
    if params.beta > 0:
        lam = split_many(params, model, metric, own, opp)
    elif metric is QosMetric.UNAVAILABILITY:
        f_own, f_opp = eval_f(model, own), eval_f(model, opp)
        lam = params.Lambda * f_opp / (f_own + f_opp)
    elif metric is QosMetric.BLOCKING or params.alpha == 0:
        lam = idp_blocking_share(params, model, own, opp)
    else:
        flat_own, flat_opp = own.ravel(), opp.ravel()
        lam = np.array([we_idp(params, model, metric, a, b).lambda1 for a, b in zip(flat_own, flat_opp)])
        lam = lam.reshape(own.shape)
    x = np.asarray(lam) * eval_f(model, own)
    rev = np.minimum(params.e, x) * own if params.beta == 0 else q._x_revenue(params, x, own)
    return rev if np.ndim(rev) else float(rev)

