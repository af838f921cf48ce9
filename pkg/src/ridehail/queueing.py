"""Stationary quantities of one platform.

A platform is a two-station network: waiting drivers (single server whose
departure rate is ``lambda f(phi) + n beta``) feeding drivers on a ride or break
(infinite server, rate ``nu``), who rejoin with probability ``p``. The stationary
law is product form,

    pi(n, r) = C * mu_n * (e/nu)^r / r!,   mu_n = prod_{a<=n} e / (lambda f + a beta),

with ``e = eta / (1 - p)``. With ``beta = 0`` (infinitely patient drivers) the
first factor is geometric and may fail to normalise.

Functions take ``(params, model, lam, phi)``. Internally most work is done on
``x = lam * f(phi)`` arrays so that price grids can be evaluated in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse, stats
from scipy.sparse.linalg import spsolve
from scipy.special import gammainc, gammaln, logsumexp

from .errors import ConfigError, DomainError, NumericalError, TruncationError
from .sensitivity import PriceModel, eval_f

DEFAULT_REL_TOL = 1e-12
_MAX_CELLS = 4_000_000


@dataclass(frozen=True)
class MarketParams:
    """Market primitives.

    ``Lambda`` passenger rate, ``eta`` driver arrival rate, ``p`` rejoin probability,
    ``nu`` ride completion rate, ``beta`` driver abandonment rate (0 means infinite
    patience), ``alpha`` no-ride delay weight and ``N_bar`` the waiting-driver cutoff
    used by the pick-up delay metric.
    """

    Lambda: float
    eta: float
    p: float = 0.5
    nu: float = 1.0
    beta: float = 0.0
    alpha: float = 0.0
    N_bar: int = 50

    def __post_init__(self):
        def finite(name, v):
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")

        for name in ("Lambda", "eta", "p", "nu", "beta", "alpha"):
            finite(name, getattr(self, name))
        if self.Lambda < 0:
            raise ConfigError("Lambda must be non-negative")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")
        if not 0 <= self.p < 1:
            raise ConfigError("p must lie in [0, 1)")
        if self.nu <= 0:
            raise ConfigError("nu must be positive")
        if self.beta < 0:
            raise ConfigError("beta must be non-negative")
        if not 0 <= self.alpha < 1:
            raise ConfigError("alpha must lie in [0, 1)")
        if int(self.N_bar) != self.N_bar or self.N_bar < 1:
            raise ConfigError("N_bar must be a positive integer")
        object.__setattr__(self, "N_bar", int(self.N_bar))

    @property
    def e(self) -> float:
        """Effective driver arrival rate ``eta / (1 - p)``."""
        return self.eta / (1.0 - self.p)

    @property
    def rho(self) -> float:
        """Driver-passenger ratio ``e / Lambda``."""
        return self.e / self.Lambda if self.Lambda > 0 else math.inf

    @classmethod
    def from_e(cls, Lambda, e, p=0.5, nu=1.0, beta=0.0, alpha=0.0, N_bar=50):
        return cls(Lambda=Lambda, eta=e * (1.0 - p), p=p, nu=nu, beta=beta, alpha=alpha, N_bar=N_bar)

    def with_(self, **changes) -> "MarketParams":
        """Copy with fields replaced; ``e`` or ``rho`` may be given instead of ``eta``."""
        if "rho" in changes:
            changes["e"] = changes.pop("rho") * changes.get("Lambda", self.Lambda)
        if "e" in changes:
            p = changes.get("p", self.p)
            changes["eta"] = changes.pop("e") * (1.0 - p)
        return replace(self, **changes)

    def to_config(self) -> dict:
        return {
            "Lambda": self.Lambda,
            "eta": self.eta,
            "p": self.p,
            "nu": self.nu,
            "beta": self.beta,
            "alpha": self.alpha,
            "N_bar": self.N_bar,
        }


@dataclass(frozen=True)
class SeriesResult:
    """Sum of ``mu_n`` over ``n >= 0``.

    ``value`` is ``inf`` and ``divergent`` is set when the series does not converge.
    ``tail_bound`` bounds the discarded remainder; ``log_value`` survives overflow.
    """

    value: float
    tail_bound: float
    terms_used: int
    divergent: bool = False
    log_value: float = math.inf


@dataclass
class _Series:
    log_s: np.ndarray  # log of the full sum
    rel_tail: np.ndarray  # remainder bound divided by the sum
    terms: int
    log_delay: np.ndarray | None  # log sum_{n=1..N_bar} mu_n / n


def _series_block(e, x, beta, n_terms, n_bar):
    a = np.arange(1, n_terms + 1, dtype=float)
    log_terms = np.cumsum(math.log(e) - np.log(x[:, None] + a[None, :] * beta), axis=1)
    log_s = np.logaddexp(0.0, logsumexp(log_terms, axis=1))
    ratio = e / (x + (n_terms + 1) * beta)
    with np.errstate(divide="ignore"):
        rel_tail = np.where(
            ratio < 1.0,
            np.exp(log_terms[:, -1] - log_s) * ratio / np.maximum(1.0 - ratio, 1e-300),
            np.inf,
        )
    log_delay = None
    if n_bar:
        log_delay = logsumexp(log_terms[:, :n_bar] - np.log(a[:n_bar]), axis=1)
    return log_s, rel_tail, log_delay


def _series(e, x, beta, n_bar=0, rel_tol=DEFAULT_REL_TOL) -> _Series:
    """Certified log-sum of the normalising series for every entry of ``x`` (beta > 0).

    The truncation point grows geometrically until the geometric majorant of the
    remainder is below ``rel_tol`` times the sum for every entry.
    """
    x = np.asarray(x, dtype=float).ravel()
    peak = max((e - float(x.min())) / beta, 0.0) if x.size else 0.0
    n_terms = max(int(math.ceil(peak + 8.0 * math.sqrt(e / beta + 1.0))) + 32, n_bar)
    out_s = np.empty_like(x)
    out_t = np.empty_like(x)
    out_d = np.empty_like(x) if n_bar else None
    while True:
        rows = max(1, _MAX_CELLS // n_terms)
        ok = True
        for start in range(0, x.size, rows):
            sl = slice(start, start + rows)
            s, t, d = _series_block(e, x[sl], beta, n_terms, n_bar)
            out_s[sl], out_t[sl] = s, t
            if n_bar:
                out_d[sl] = d
            if np.any(t > rel_tol):
                ok = False
                break
        if ok:
            return _Series(out_s, out_t, n_terms + 1, out_d)
        if n_terms > 50_000_000:
            raise NumericalError("normalising series failed to converge")
        n_terms *= 2


def _log_normalizer(e, x, beta):
    """Fast ``log sum_n mu_n`` for batches (beta > 0).

    Entries with ``x < e`` have a long series; for them the identity
    ``sum_n z^n / (s+1)_n = e^z z^-s Gamma(s+1) P(s, z)`` with ``s = x/beta``,
    ``z = e/beta`` and ``P`` the regularised lower incomplete gamma function is used.
    Entries with ``x >= e`` converge within a few hundred terms and are summed directly.
    """
    x = np.asarray(x, dtype=float).ravel()
    out = np.empty_like(x)
    z = e / beta
    short = x >= e
    if np.any(short):
        out[short] = _series(e, x[short], beta).log_s
    long_ = ~short
    if np.any(long_):
        s = x[long_] / beta
        with np.errstate(divide="ignore"):
            val = z - s * math.log(z) + gammaln(s + 1.0) + np.log(gammainc(s, z))
        # gammainc returns 0 for subnormal s; those rates are the lambda = 0 limit
        out[long_] = np.where(s < np.finfo(float).tiny, z, val)
    return out


def _log_delay_sum(e, x, beta, n_bar):
    """``log sum_{n=1..n_bar} mu_n / n`` by direct summation."""
    x = np.asarray(x, dtype=float).ravel()
    a = np.arange(1, n_bar + 1, dtype=float)
    log_terms = np.cumsum(math.log(e) - np.log(x[:, None] + a[None, :] * beta), axis=1)
    return logsumexp(log_terms - np.log(a), axis=1)


def _acceptance(model, lam, phi):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise DomainError("arrival rate must be non-negative")
    return lam * eval_f(model, phi)


def _x_unavailability(params, x):
    """Unavailability as a function of ``x = lambda f``."""
    x = np.asarray(x, dtype=float)
    e = params.e
    if params.beta > 0:
        return np.exp(-_log_normalizer(e, x, params.beta)).reshape(x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > e, 1.0 - e / x, 0.0)


def _x_delay(params, x, f):
    """Pick-up delay metric from ``x = lambda f`` and acceptance ``f``."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    e, alpha, n_bar = params.e, params.alpha, params.N_bar
    if params.beta > 0:
        log_s = _log_normalizer(e, x, params.beta)
        u = np.exp(-log_s).reshape(x.shape)
        extra = np.exp(_log_delay_sum(e, x, params.beta, n_bar) - log_s).reshape(x.shape)
        return u * f + (1.0 - f) + alpha * f * extra
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(x > 0, e / x, np.inf)
        live = ratio < 1.0
        r = np.where(live, ratio, 0.0)
        powers = r[..., None] ** np.arange(1, n_bar + 1)
        partial = (powers / np.arange(1, n_bar + 1)).sum(axis=-1)
        return 1.0 - f + np.where(live, f * (1.0 - r) * (1.0 + alpha * partial), 0.0)


def _x_revenue(params, x, phi):
    x = np.asarray(x, dtype=float)
    if params.beta > 0:
        return x * phi * (1.0 - _x_unavailability(params, x))
    return np.minimum(params.e, x) * phi


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def mu_series(params: MarketParams, model: PriceModel, lam, phi, rel_tol=DEFAULT_REL_TOL) -> SeriesResult:
    """Normalising series ``sum_n mu_n`` with a certified remainder bound."""
    if rel_tol <= 0:
        raise DomainError("rel_tol must be positive")
    x = float(_acceptance(model, lam, phi))
    e = params.e
    if params.beta == 0:
        if e < x:
            value = 1.0 / (1.0 - e / x)
            return SeriesResult(value, 0.0, 0, False, math.log(value))
        return SeriesResult(math.inf, math.inf, 0, True, math.inf)
    ser = _series(e, np.array([x]), params.beta, rel_tol=rel_tol)
    log_s = float(ser.log_s[0])
    value = math.exp(log_s) if log_s < 709 else math.inf
    return SeriesResult(value, float(ser.rel_tail[0]) * value, ser.terms, False, log_s)


def unavailability(params: MarketParams, model: PriceModel, lam, phi):
    """Stationary probability that no driver is waiting."""
    return _out(_x_unavailability(params, _acceptance(model, lam, phi)))


def blocking(params: MarketParams, model: PriceModel, lam, phi):
    """Fraction of passengers who leave without a ride: ``U f + 1 - f``."""
    f = eval_f(model, phi)
    u = _x_unavailability(params, _acceptance(model, lam, phi))
    return _out(u * f + (1.0 - f))


def pickup_delay_qos(params: MarketParams, model: PriceModel, lam, phi):
    """Scaled expected pick-up delay; equals :func:`blocking` when ``alpha = 0``."""
    f = eval_f(model, phi)
    if params.alpha == 0:
        return blocking(params, model, lam, phi)
    return _out(_x_delay(params, _acceptance(model, lam, phi), f))


def revenue_rate(params: MarketParams, model: PriceModel, lam, phi):
    """Long-run matching revenue per unit time ``lambda f phi (1 - U)``.

    With ``beta = 0`` this is ``min(e, lambda f) * phi``.
    """
    return _out(_x_revenue(params, _acceptance(model, lam, phi), phi))


def default_truncation(params: MarketParams) -> int:
    e = params.e
    return int(math.ceil(10.0 * max(e / params.nu, e / (params.beta + 1e-9), 10.0)))


def joint_stationary(params: MarketParams, model: PriceModel, lam, phi, n_max=None, r_max=None,
                     max_omitted=1e-10) -> np.ndarray:
    """Product-form ``pi(n, r)`` on ``0..n_max`` x ``0..r_max`` (not renormalised).

    Raises :class:`TruncationError` when the certified omitted mass exceeds ``max_omitted``.
    """
    if params.beta <= 0:
        raise DomainError("the product form needs beta > 0 to normalise")
    n_max = default_truncation(params) if n_max is None else int(n_max)
    r_max = default_truncation(params) if r_max is None else int(r_max)
    x = float(_acceptance(model, lam, phi))
    e, beta = params.e, params.beta
    ser = _series(e, np.array([x]), beta)
    log_s = float(ser.log_s[0])
    n_all = max(n_max, ser.terms)
    a = np.arange(1, n_all + 1, dtype=float)
    log_mu = np.concatenate([[0.0], np.cumsum(math.log(e) - np.log(x + a * beta))])
    tail_n = float(np.exp(logsumexp(log_mu[n_max + 1:]) - log_s)) if n_all > n_max else 0.0
    tail_n += float(ser.rel_tail[0])
    tail_r = float(stats.poisson.sf(r_max, e / params.nu))
    omitted = tail_n + tail_r - tail_n * tail_r
    if omitted > max_omitted:
        raise TruncationError(f"truncation omits mass {omitted:.3e} > {max_omitted:.1e}", omitted)
    pn = np.exp(log_mu[: n_max + 1] - log_s)
    pr = stats.poisson.pmf(np.arange(r_max + 1), e / params.nu)
    return np.outer(pn, pr)


def generator_matrix(params: MarketParams, x: float, n_max: int, r_max: int) -> sparse.csr_matrix:
    """Generator of the chain on the box ``0..n_max`` x ``0..r_max``.

    Transitions leaving the box are dropped, so the chain reflects at the boundary.
    State ``(n, r)`` has index ``n * (r_max + 1) + r``.
    """
    eta, p, nu, beta = params.eta, params.p, params.nu, params.beta
    width = r_max + 1
    rows, cols, vals = [], [], []

    def add(src, dst, rate):
        if rate > 0:
            rows.append(src)
            cols.append(dst)
            vals.append(rate)

    for n in range(n_max + 1):
        for r in range(r_max + 1):
            s = n * width + r
            if n < n_max:
                add(s, s + width, eta)
            if n > 0 and r < r_max:
                add(s, s - width + 1, x + n * beta)
            if r > 0:
                if n < n_max:
                    add(s, s + width - 1, r * nu * p)
                add(s, s - 1, r * nu * (1.0 - p))
    size = (n_max + 1) * width
    q = sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    out = np.asarray(q.sum(axis=1)).ravel()
    q = q - sparse.diags(out)
    return q.tocsr()


def ctmc_oracle(params: MarketParams, model: PriceModel, lam, phi, n_max=30, r_max=30,
                residual_tol=1e-12) -> np.ndarray:
    """Stationary law of the truncated chain by a direct sparse linear solve of ``pi Q = 0``."""
    if params.beta <= 0:
        raise DomainError("the truncated chain oracle expects beta > 0")
    x = float(_acceptance(model, lam, phi))
    q = generator_matrix(params, x, int(n_max), int(r_max))
    size = q.shape[0]
    a = q.T.tolil()
    a[size - 1, :] = np.ones(size)
    b = np.zeros(size)
    b[-1] = 1.0
    with np.errstate(all="raise"):
        try:
            pi = spsolve(a.tocsc(), b)
        except (FloatingPointError, RuntimeError) as exc:
            raise NumericalError(f"singular generator solve: {exc}") from None
    if not np.all(np.isfinite(pi)):
        raise NumericalError("singular generator solve")
    residual = np.abs(q.T @ pi).max()
    if residual > residual_tol:
        raise NumericalError(f"global balance residual {residual:.2e} exceeds {residual_tol:.0e}")
    return pi.reshape(n_max + 1, r_max + 1)
