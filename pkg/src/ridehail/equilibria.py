"""Monopoly optimum, duopoly equilibria and their verification.

Unless stated otherwise everything here concerns infinitely patient drivers
(``beta = 0``), where payoffs have closed piecewise forms. The blocking-metric
duopoly has three regimes in ``rho = e / Lambda``:

* ``rho <= f(phi_b)/2``: a symmetric pure equilibrium at ``f^-1(2 rho)``;
* ``f(phi_b)/2 < rho < 1``: no pure equilibrium, a mixed one on ``[phi_L*, phi_R*]``,
  which is also an equilibrium cycle;
* ``rho >= 1``: prices near zero are epsilon-equilibria.

Pre-limit (``beta > 0``) checks use the Wardrop split computed by bisection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import queueing as q
from ._numerics import golden_max, root_decreasing
from .errors import DomainError, RegimeError
from .queueing import MarketParams
from .sensitivity import PriceModel, eval_f, eval_f_inverse, phi_f_prime

from .wardrop import QosMetric, payoff_against, split_many

# ---------------------------------------------------------------- thresholds


class ThresholdKind(enum.Enum):
    """``c1 f + c2 phi f'`` with ``(c1, c2)`` per kind."""

    DM = (1.0, 1.0)
    DB = (1.0, 2.0)
    DU = (2.0, 1.0)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise DomainError(f"unknown threshold kind {value!r}") from None


def threshold_value(kind, model: PriceModel, phi):
    c1, c2 = ThresholdKind.parse(kind).value
    return c1 * eval_f(model, phi) + c2 * phi_f_prime(model, phi)


def threshold_root(kind, model: PriceModel) -> float:
    """Largest price in ``[0, phi_h]`` where the threshold function is non-negative."""
    kind = ThresholdKind.parse(kind)
    fun = lambda t: threshold_value(kind, model, t)  # noqa: E731
    if fun(model.phi_h) >= 0:
        return float(model.phi_h)
    return root_decreasing(fun, 0.0, model.phi_h, xtol=1e-12)


def m_function(params: MarketParams, model: PriceModel, phi):
    """``m(phi) = (Lambda f(phi) - e) phi``: the payoff of the higher-priced platform."""
    return (params.Lambda * eval_f(model, phi) - params.e) * phi


# ------------------------------------------------------------------- regimes


class Regime(enum.Enum):
    DRIVER_SCARCE = "DriverScarce"  # rho <= f(phi_m)/2: pure equilibrium coincides with the monopoly price
    INTERMEDIATE = "Intermediate"  # f(phi_m)/2 < rho <= f(phi_b)/2
    PASSENGER_SCARCE = "PassengerScarce"  # f(phi_b)/2 < rho < 1: mixed equilibrium / cycle
    SATURATED = "Saturated"  # rho >= 1


def classify_regime(params: MarketParams, model: PriceModel) -> Regime:
    rho = params.rho
    if rho >= 1:
        return Regime.SATURATED
    f_b = eval_f(model, threshold_root(ThresholdKind.DB, model))
    if rho > f_b / 2:
        return Regime.PASSENGER_SCARCE
    f_m = eval_f(model, threshold_root(ThresholdKind.DM, model))
    return Regime.DRIVER_SCARCE if rho <= f_m / 2 else Regime.INTERMEDIATE


@dataclass(frozen=True)
class PureNE:
    price: float
    payoff: float
    regime: Regime
    kind: str = field(default="PureNE", init=False)


@dataclass(frozen=True)
class MixedNE:
    """Symmetric mixed equilibrium; its support is also an equilibrium cycle."""

    support: tuple
    mean_payoff: float
    regime: Regime
    params: MarketParams = field(repr=False)
    model: PriceModel = field(repr=False)
    kind: str = field(default="MixedNE", init=False)

    def cdf(self, phi):
        return mixed_ne_cdf(self.params, self.model, phi)

    @property
    def cycle(self) -> tuple:
        return self.support


@dataclass(frozen=True)
class EpsNE:
    price: float
    eps: float
    regime: Regime
    unique: bool = False
    kind: str = field(default="EpsNE", init=False)


def _require_idp(params):
    if params.beta != 0:
        raise RegimeError("this closed form describes beta = 0; set beta to 0")


# ------------------------------------------------------------------ monopoly


def monopoly_payoff(params: MarketParams, model: PriceModel, phi):
    """Per-platform monopoly payoff ``min(e, (Lambda/2) f(phi)) phi``.

    Equal to ``e phi`` below ``f^-1(2 rho)`` and ``(Lambda/2) f phi`` above it; the
    min form stays right at ``phi_h`` when ``2 rho < f(phi_h)``.
    """
    phi_arr = np.asarray(phi, dtype=float)
    out = np.minimum(params.e, 0.5 * params.Lambda * eval_f(model, phi_arr)) * phi_arr
    return out if out.ndim else float(out)


def monopoly_optimal(params: MarketParams, model: PriceModel):
    """Optimal monopoly ``(price, payoff)``: ``f^-1(2 rho)`` when ``rho <= f(phi_m)/2``, else ``phi_m``."""
    _require_idp(params)
    phi_m = threshold_root(ThresholdKind.DM, model)
    if params.rho <= eval_f(model, phi_m) / 2:
        price = eval_f_inverse(model, 2.0 * params.rho)
    else:
        price = phi_m
    return price, monopoly_payoff(params, model, price)


def monopoly_grid_optimum(params: MarketParams, model: PriceModel, grid_n: int = 10_000):
    """Brute-force cross-check: ``(price, payoff, grid_step)`` maximising the monopoly payoff on a uniform grid."""
    grid = np.linspace(0.0, model.phi_h, grid_n)
    vals = monopoly_payoff(params, model, grid)
    k = int(np.argmax(vals))
    return float(grid[k]), float(vals[k]), float(grid[1] - grid[0])


# ------------------------------------------------------------------- duopoly


def duopoly_u_ne(params: MarketParams, model: PriceModel) -> PureNE:
    """Symmetric equilibrium when passengers split by unavailability."""
    _require_idp(params)
    phi_u = threshold_root(ThresholdKind.DU, model)
    if params.rho <= eval_f(model, phi_u) / 2:
        price = eval_f_inverse(model, 2.0 * params.rho)
    else:
        price = phi_u
    payoff = min(params.e, 0.5 * params.Lambda * eval_f(model, price)) * price
    return PureNE(price, payoff, classify_regime(params, model))


def ec_endpoints(params: MarketParams, model: PriceModel):
    """``(phi_L*, phi_R*)``: ``phi_R*`` maximises ``m`` and ``phi_L* = m(phi_R*) / e``."""
    regime = classify_regime(params, model)
    if regime is not Regime.PASSENGER_SCARCE:
        raise RegimeError(f"no mixed equilibrium for rho = {params.rho:.6g} ({regime.value})")
    phi_r, m_r = golden_max(lambda t: m_function(params, model, t), 0.0, model.phi_h, tol=1e-10)
    phi_l = m_r / params.e
    t2, t1 = eval_f_inverse(model, 2 * params.rho), eval_f_inverse(model, params.rho)
    if not (t2 - 1e-9 <= phi_l <= phi_r <= t1 + 1e-9):
        raise RegimeError("cycle endpoints violate f^-1(2 rho) < phi_L* < phi_R* <= f^-1(rho)")
    return phi_l, phi_r


def mixed_ne_cdf(params: MarketParams, model: PriceModel, phi):
    """Equilibrium CDF ``(e (phi + phi_R*) - Lambda f(phi_R*) phi_R*) / (2 e phi - Lambda f(phi) phi)``.

    Exactly 0 at ``phi_L*`` and exactly 1 at ``phi_R*``.
    """
    phi_l, phi_r = ec_endpoints(params, model)
    arr = np.asarray(phi, dtype=float)
    slack = 1e-12 * max(1.0, phi_r)
    if np.any(arr < phi_l - slack) or np.any(arr > phi_r + slack):
        raise DomainError(f"price outside the support [{phi_l}, {phi_r}]")
    e, lam_total = params.e, params.Lambda
    num = e * (arr + phi_r) - lam_total * eval_f(model, phi_r) * phi_r
    den = 2 * e * arr - lam_total * eval_f(model, np.clip(arr, 0, model.phi_h)) * arr
    out = np.clip(num / den, 0.0, 1.0)
    out = np.where(arr <= phi_l, 0.0, np.where(arr >= phi_r, 1.0, out))
    return out if out.ndim else float(out)


def mixed_payoff(params: MarketParams, model: PriceModel, phi, sigma: MixedNE | None = None):
    """Payoff of price ``phi`` against the equilibrium mixture.

    Inside the support this is ``m(phi) F(phi) + e phi (1 - F(phi))``; below it ``e phi``
    and above it ``max(m(phi), 0)``.
    """
    if sigma is None:
        phi_l, phi_r = ec_endpoints(params, model)
    else:
        phi_l, phi_r = sigma.support
    arr = np.asarray(phi, dtype=float)
    e = params.e
    m = m_function(params, model, arr)
    inside = (arr >= phi_l) & (arr <= phi_r)
    cdf = np.zeros_like(arr)
    if np.any(inside):
        cdf[inside] = mixed_ne_cdf(params, model, arr[inside])
    out = np.where(inside, m * cdf + e * arr * (1 - cdf), np.where(arr < phi_l, e * arr, np.maximum(m, 0.0)))
    return out if out.ndim else float(out)


def eps_ne_delta(params: MarketParams, model: PriceModel, eps: float) -> float:
    """Supremum of ``delta`` with ``Lambda f(phi) phi < eps`` for all ``phi <= delta``.

    ``f(phi) phi`` rises up to ``phi_m`` and falls afterwards, so the answer is
    ``phi_h`` when the peak stays below ``eps`` and otherwise the first crossing,
    located by bisection. The returned value satisfies the strict inequality.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    phi_m = threshold_root(ThresholdKind.DM, model)
    g = lambda t: params.Lambda * eval_f(model, t) * t  # noqa: E731
    if g(phi_m) < eps:
        return float(model.phi_h)
    lo, hi = 0.0, phi_m
    while hi - lo > 1e-14 * max(1.0, phi_m):
        mid = 0.5 * (lo + hi)
        if g(mid) < eps:
            lo = mid
        else:
            hi = mid
    return lo


def duopoly_b_equilibrium(params: MarketParams, model: PriceModel, eps: float = 1e-2):
    """Symmetric equilibrium when passengers split by blocking probability."""
    _require_idp(params)
    regime = classify_regime(params, model)
    rho = params.rho
    if regime is Regime.SATURATED:
        return EpsNE(eps_ne_delta(params, model, eps), eps, regime, unique=False)
    if regime is Regime.PASSENGER_SCARCE:
        phi_l, phi_r = ec_endpoints(params, model)
        return MixedNE((phi_l, phi_r), float(m_function(params, model, phi_r)), regime, params, model)
    price = eval_f_inverse(model, 2.0 * rho)
    return PureNE(price, min(params.e, 0.5 * params.Lambda * eval_f(model, price)) * price, regime)


# ---------------------------------------------------------- cycle checks


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class ECReport:
    interval: tuple
    stability: ConditionResult
    cyclicity: ConditionResult
    minimality: ConditionResult
    refuted: int
    tested: int

    @property
    def passed(self) -> bool:
        return self.stability.passed and self.cyclicity.passed and self.minimality.passed


class _PayoffTable:
    """Own payoff ``P[i, j]`` for own price ``grid[i]`` against opponent price ``grid[j]``."""

    def __init__(self, grid, payoff_fn):
        self.grid = np.unique(np.asarray(grid, dtype=float))
        self.P = payoff_fn(self.grid[:, None], self.grid[None, :])

    def idx(self, lo, hi, inside=True):
        g = self.grid
        mask = (g >= lo) & (g <= hi)
        return np.flatnonzero(mask if inside else ~mask)

    def conditions(self, a, b, eps=0.0):
        """Grid versions of stability (i) and cyclicity (ii) for ``[a, b]``.

        Opponent prices range over ``[a + eps, b - eps]``, deviations over ``[a, b]``
        and the competing outside actions over the complement of ``[a - eps, b + eps]``.
        """
        opp = self.idx(a + eps, b - eps)
        cand = self.idx(a, b)
        out = self.idx(a - eps, b + eps, inside=False)
        if opp.size == 0 or cand.size == 0:
            return ConditionResult(True), ConditionResult(True)
        best_in = self.P[np.ix_(cand, opp)].max(axis=0)
        out_max = self.P[np.ix_(out, opp)].max(axis=0) if out.size else np.full(opp.size, -np.inf)
        bad = np.flatnonzero(~(best_in > out_max))
        stab = ConditionResult(bad.size == 0, None if bad.size == 0 else (float(self.grid[opp[bad[0]]]),))
        current = self.P[np.ix_(opp, opp)]  # current[j, k]: own price opp[j] vs opp[k]
        thresh = np.maximum(current, out_max[None, :])
        p1_moves = best_in[None, :] > thresh  # player with price opp[j] facing opp[k]
        ok = p1_moves | p1_moves.T
        bad2 = np.argwhere(~ok)
        cyc = ConditionResult(
            bad2.size == 0,
            None if bad2.size == 0 else (float(self.grid[opp[bad2[0][0]]]), float(self.grid[opp[bad2[0][1]]])),
        )
        return stab, cyc


def _family(lo, hi, n, extra=()):
    pts = np.linspace(lo, hi, n)
    fam = [(float(c), float(d)) for i, c in enumerate(pts) for d in pts[i + 1:]]
    fam.extend((float(c), float(d)) for c, d in extra)
    return fam


def _minimality(table, family, exclude=None):
    refuted, witness = 0, None
    tested = 0
    for c, d in family:
        if exclude is not None and (c, d) == exclude:
            continue
        tested += 1
        s, cy = table.conditions(c, d)
        if s.passed and cy.passed:
            witness = witness or (c, d)
        else:
            refuted += 1
    return ConditionResult(witness is None, witness), refuted, tested


def _grid_for(model, interval, grid_n, outside_n, family_lo_hi, family_n, extra, eps=0.0):
    a, b = interval
    pts = [np.linspace(0.0, model.phi_h, outside_n), np.linspace(a, b, grid_n)]
    if eps:
        pts.append(np.linspace(a + eps, b - eps, grid_n))
        pts.append(np.array([a - eps, b + eps]))
    pts.append(np.linspace(*family_lo_hi, family_n))
    for c, d in extra:
        pts.append(np.array([c, d]))
    g = np.concatenate(pts)
    return g[(g >= 0) & (g <= model.phi_h)]


def verify_ec(params: MarketParams, model: PriceModel, interval, grid_n: int = 200, outside_n: int = 800,
              family_n: int = 20, extra_candidates=()) -> ECReport:
    """Grid check that ``interval`` is an equilibrium cycle of the ``beta = 0`` blocking game.

    Minimality is refuted or confirmed over sub-intervals with endpoints on a
    ``family_n`` point grid (plus ``extra_candidates``); this is sound as a refutation
    but only grid-limited as a proof.
    """
    if grid_n < 50:
        raise DomainError("grid_n must be at least 50")
    a, b = map(float, interval)
    p0 = params.with_(beta=0.0)
    grid = _grid_for(model, (a, b), grid_n, outside_n, (a, b), family_n, extra_candidates)
    table = _PayoffTable(grid, lambda own, opp: payoff_against(p0, model, QosMetric.BLOCKING, own, opp))
    stab, cyc = table.conditions(a, b)
    family = [(c, d) for c, d in _family(a, b, family_n, extra_candidates) if a <= c and d <= b]
    mini, refuted, tested = _minimality(table, family, exclude=(a, b))
    return ECReport((a, b), stab, cyc, mini, refuted, tested)


def _require_cycle_regime(params, model):
    if classify_regime(params, model) is not Regime.PASSENGER_SCARCE:
        raise RegimeError(f"rho = {params.rho:.6g} lies outside (f(phi_b)/2, 1)")


def verify_eps_ec(params: MarketParams, model: PriceModel, interval, eps: float, beta: float | None = None,
                  grid_n: int = 80, outside_n: int = 160, family_n: int = 20,
                  metric=QosMetric.BLOCKING) -> ECReport:
    """Grid check of the epsilon-relaxed cycle conditions with payoffs at abandonment rate ``beta``.

    Stability and cyclicity use opponents in ``[a+eps, b-eps]`` and outside actions beyond
    ``[a-eps, b+eps]``. Minimality asks that no sub-interval of ``[a+eps, b-eps]``
    (endpoints on a ``family_n`` grid, the whole shrunk interval included) satisfies the
    unrelaxed stability and cyclicity conditions.
    """
    _require_cycle_regime(params, model)
    a, b = map(float, interval)
    pb = params.with_(beta=params.beta if beta is None else float(beta))
    lo, hi = a + eps, b - eps
    grid = _grid_for(model, (a, b), grid_n, outside_n, (lo, hi) if hi > lo else (a, b), family_n, (), eps)
    table = _PayoffTable(grid, _symmetric_payoffs(pb, model, metric))
    stab, cyc = table.conditions(a, b, eps)
    if hi > lo:
        family = _family(lo, hi, family_n)
        mini, refuted, tested = _minimality(table, family)
    else:
        mini, refuted, tested = ConditionResult(True), 0, 0
    return ECReport((a, b), stab, cyc, mini, refuted, tested)


def _symmetric_payoffs(params, model, metric):
    """Payoff function for a full grid that solves each unordered price pair once."""

    def fn(own, opp):
        g = own[:, 0]
        i, j = np.triu_indices(g.size)
        if params.beta > 0:
            lam_i = split_many(params, model, metric, g[i], g[j])
            p_ij = q._x_revenue(params, lam_i * eval_f(model, g[i]), g[i])
            p_ji = q._x_revenue(params, (params.Lambda - lam_i) * eval_f(model, g[j]), g[j])
        else:
            p_ij = payoff_against(params, model, metric, g[i], g[j])
            p_ji = payoff_against(params, model, metric, g[j], g[i])
        P = np.empty((g.size, g.size))
        P[i, j] = p_ij
        P[j, i] = p_ji
        return P

    return fn


# --------------------------------------------------------- epsilon-NE check


@dataclass(frozen=True)
class EpsReport:
    max_gain: float
    gains: tuple
    witness: tuple | None
    candidate_payoffs: tuple
    eps: float

    @property
    def passed(self) -> bool:
        return self.max_gain <= self.eps


def _quadrature(mixed: MixedNE, cells: int = 512):
    phi_l, phi_r = mixed.support
    edges = np.linspace(phi_l, phi_r, cells + 1)
    weights = np.diff(mixed.cdf(edges))
    mids = 0.5 * (edges[1:] + edges[:-1])
    return mids, weights


def _deviation_grid(params, model, grid_n, extra):
    pts = [np.linspace(0.0, model.phi_h, grid_n), np.asarray(extra, dtype=float)]
    rho = params.rho
    for x in (2 * rho, rho):
        pts.append(np.array([eval_f_inverse(model, x)]))
    pts.append(np.array([threshold_root(ThresholdKind.DM, model), threshold_root(ThresholdKind.DB, model)]))
    g = np.unique(np.concatenate(pts))
    return g[(g >= 0) & (g <= model.phi_h)]


def verify_eps_ne(params: MarketParams, model: PriceModel, metric, candidate, eps: float,
                  beta: float | None = None, alpha: float | None = None, grid_n: int = 2000,
                  cells: int = 512, refine: bool = True) -> EpsReport:
    """Largest unilateral gain against ``candidate`` over a deviation grid, per player.

    ``candidate`` is a symmetric price, a price pair or a :class:`MixedNE`. Mixed
    opponents are integrated with the equilibrium CDF on ``cells`` equal-width cells.
    The best grid deviation is polished with a golden-section search between its
    neighbours.
    """
    metric = QosMetric.parse(metric)
    changes = {}
    if beta is not None:
        changes["beta"] = float(beta)
    if alpha is not None:
        changes["alpha"] = float(alpha)
    pp = params.with_(**changes) if changes else params

    if isinstance(candidate, MixedNE):
        nodes, weights = _quadrature(candidate, cells)
        opp_sets = [(nodes, weights), (nodes, weights)]
        own_prices = [None, None]
        players = 1
    else:
        pair = (float(candidate), float(candidate)) if np.ndim(candidate) == 0 else tuple(map(float, candidate))
        opp_sets = [(np.array([pair[1]]), np.array([1.0])), (np.array([pair[0]]), np.array([1.0]))]
        own_prices = [pair[0], pair[1]]
        players = 1 if pair[0] == pair[1] else 2

    def value(own, opp_nodes, opp_w):
        own = np.atleast_1d(np.asarray(own, dtype=float))
        pay = payoff_against(pp, model, metric, own[:, None], opp_nodes[None, :])
        return np.asarray(pay).reshape(own.size, opp_nodes.size) @ opp_w

    gains, witness, cand_pay = [], None, []
    best_gain = -math.inf
    for i in range(players):
        nodes, w = opp_sets[i]
        if own_prices[i] is None:
            current = float(w @ value(nodes, nodes, w))
        else:
            current = float(value(own_prices[i], nodes, w)[0])
        grid = _deviation_grid(pp, model, grid_n, list(nodes[:1]) + ([own_prices[i]] if own_prices[i] is not None else []))
        vals = value(grid, nodes, w)
        k = int(np.argmax(vals))
        dev_price, dev_val = float(grid[k]), float(vals[k])
        if refine:
            lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
            x, fx = golden_max(lambda t: float(value(t, nodes, w)[0]), lo, hi, tol=1e-9)
            if fx > dev_val:
                dev_price, dev_val = x, fx
        gain = dev_val - current
        gains.append(gain)
        cand_pay.append(current)
        if gain > best_gain:
            best_gain, witness = gain, (i + 1, dev_price, dev_val)
    if players == 1:
        gains.append(gains[0])
        cand_pay.append(cand_pay[0])
    return EpsReport(float(best_gain), tuple(gains), witness, tuple(cand_pay), eps)


# ------------------------------------------------------------ security value


@dataclass(frozen=True)
class SecurityResult:
    value: float
    strategy: float
    grid_value: float
    grid_strategy: float
    grid_step: float


def security_value(params: MarketParams, model: PriceModel, grid_n: int = 300) -> SecurityResult:
    """Max-min payoff ``m(phi_R*)`` and the price ``phi_R*`` securing it, with a grid cross-check."""
    _require_cycle_regime(params, model)
    _, phi_r = ec_endpoints(params, model)
    value = float(m_function(params, model, phi_r))
    p0 = params.with_(beta=0.0)
    grid = np.linspace(0.0, model.phi_h, grid_n)
    P = payoff_against(p0, model, QosMetric.BLOCKING, grid[:, None], grid[None, :])
    worst = P.min(axis=1)
    k = int(np.argmax(worst))
    return SecurityResult(value, phi_r, float(worst[k]), float(grid[k]), float(grid[1] - grid[0]))


# --------------------------------------------------------------- comparison


@dataclass(frozen=True)
class ComparisonRow:
    regime: str
    price: float
    payoff: float
    support: tuple | None = None


@dataclass(frozen=True)
class ComparisonTable:
    rho: float
    rows: tuple
    b_price_le_monopoly: bool
    monopoly_price_le_u: bool
    duopoly_payoff_le_monopoly: bool

    def row(self, regime):
        for r in self.rows:
            if r.regime == regime:
                return r
        raise KeyError(regime)

    @property
    def all_dominance(self) -> bool:
        return self.b_price_le_monopoly and self.monopoly_price_le_u and self.duopoly_payoff_le_monopoly


def cooperative_optimal(params: MarketParams, model: PriceModel):
    """Pooled platforms serving all demand with all drivers; per-platform ``(price, payoff)``.

    The monopoly problem describes one platform facing half the demand, so pooling is
    the monopoly problem with both ``Lambda`` and ``e`` doubled (``rho`` unchanged),
    with the resulting payoff split evenly.
    """
    pooled = params.with_(Lambda=2 * params.Lambda, e=2 * params.e)
    price, payoff = monopoly_optimal(pooled, model)
    return price, payoff / 2.0


def compare_regimes(params: MarketParams, model: PriceModel, tol: float = 1e-9) -> ComparisonTable:
    """Monopoly, both duopolies and cooperation side by side, with dominance flags."""
    _require_idp(params)
    mono_price, mono_pay = monopoly_optimal(params, model)
    u = duopoly_u_ne(params, model)
    regime = classify_regime(params, model)
    if regime is Regime.SATURATED:
        b_row = ComparisonRow("Duopoly-B", 0.0, 0.0)
        b_top = 0.0
    elif regime is Regime.PASSENGER_SCARCE:
        phi_l, phi_r = ec_endpoints(params, model)
        b_row = ComparisonRow("Duopoly-B", phi_r, float(m_function(params, model, phi_r)), (phi_l, phi_r))
        b_top = phi_r
    else:
        ne = duopoly_b_equilibrium(params, model)
        b_row = ComparisonRow("Duopoly-B", ne.price, ne.payoff)
        b_top = ne.price
    coop_price, coop_pay = cooperative_optimal(params, model)
    rows = (
        ComparisonRow("Monopoly", mono_price, mono_pay),
        ComparisonRow("Duopoly-U", u.price, u.payoff),
        b_row,
        ComparisonRow("Cooperative", coop_price, coop_pay),
    )
    return ComparisonTable(
        params.rho,
        rows,
        b_top <= mono_price + tol,
        mono_price <= u.price + tol,
        b_row.payoff <= mono_pay + tol and u.payoff <= mono_pay + tol,
    )
