"""Best responses and alternating best-response dynamics between two platforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import golden_max
from .equilibria import Regime, ThresholdKind, classify_regime, ec_endpoints, threshold_root
from .errors import DomainError
from .queueing import MarketParams
from .sensitivity import PriceModel, eval_f_inverse
from .wardrop import QosMetric, payoff_against, payoffs_at_we


@dataclass(frozen=True)
class BestResponse:
    price: float
    payoff: float
    exact: bool  # False at beta = 0, where only a grid supremum is available
    zero_payoff: bool = False


def landmarks(params: MarketParams, model: PriceModel):
    """Prices where the limiting payoffs bend or jump."""
    rho = params.rho
    pts = [
        eval_f_inverse(model, min(2 * rho, 2.0)),
        eval_f_inverse(model, min(rho, 2.0)),
        threshold_root(ThresholdKind.DM, model),
        threshold_root(ThresholdKind.DB, model),
    ]
    if math.isfinite(rho) and classify_regime(params, model) is Regime.PASSENGER_SCARCE:
        pts.extend(ec_endpoints(params.with_(beta=0.0), model))
    return pts


def _pp(params, beta, alpha):
    changes = {}
    if beta is not None:
        changes["beta"] = float(beta)
    if alpha is not None:
        changes["alpha"] = float(alpha)
    return params.with_(**changes) if changes else params


def best_response(params: MarketParams, model: PriceModel, metric, phi_opp: float, beta: float | None = None,
                  alpha: float | None = None, grid_n: int = 2000, refine: bool = True,
                  _marks=None) -> BestResponse:
    """Revenue-maximising price against ``phi_opp``, re-solving the passenger split for every candidate.

    Candidates are a uniform grid, the opponent's price and the landmark prices.
    Ties go to the largest price. With ``beta > 0`` the winner is polished by a
    golden-section search between its grid neighbours.
    """
    metric = QosMetric.parse(metric)
    pp = _pp(params, beta, alpha)
    marks = landmarks(pp, model) if _marks is None else _marks
    cand = np.unique(np.concatenate([np.linspace(0.0, model.phi_h, grid_n), [float(phi_opp)], marks]))
    cand = cand[(cand >= 0) & (cand <= model.phi_h)]
    vals = np.asarray(payoff_against(pp, model, metric, cand, float(phi_opp)), dtype=float)
    top = float(vals.max())
    if top <= 0:
        return BestResponse(0.0, 0.0, pp.beta > 0, zero_payoff=True)
    k = int(np.flatnonzero(vals >= top - 1e-12 * abs(top))[-1])
    price, value = float(cand[k]), float(vals[k])
    if refine and pp.beta > 0:
        lo, hi = cand[max(k - 1, 0)], cand[min(k + 1, cand.size - 1)]
        x, fx = golden_max(lambda t: float(payoff_against(pp, model, metric, t, float(phi_opp))), lo, hi, tol=1e-9)
        if fx > value:
            price, value = float(x), float(fx)
    return BestResponse(price, value, pp.beta > 0)


@dataclass(frozen=True)
class BRPoint:
    iteration: int
    player: int
    price: float
    payoff: float


@dataclass(frozen=True)
class BRTrajectory:
    points: tuple
    params: MarketParams
    metric: QosMetric
    beta: float
    alpha: float
    init: tuple = field(default=(0.0, 0.0))

    def prices(self) -> np.ndarray:
        return np.array([p.price for p in self.points])

    def rows(self):
        return [(p.iteration, p.player, p.price, p.payoff) for p in self.points]


def alternating_br(params: MarketParams, model: PriceModel, metric, init, iters: int, beta: float | None = None,
                   alpha: float | None = None, grid_n: int = 2000) -> BRTrajectory:
    """Players take turns best-responding, player 1 first. Deterministic given the inputs."""
    if iters < 2:
        raise DomainError("iters must be at least 2")
    metric = QosMetric.parse(metric)
    pp = _pp(params, beta, alpha)
    marks = landmarks(pp, model)
    prices = [float(init[0]), float(init[1])]
    points = []
    for it in range(1, iters + 1):
        player = 1 if it % 2 else 2
        me, other = player - 1, 2 - player
        br = best_response(pp, model, metric, prices[other], grid_n=grid_n, _marks=marks)
        prices[me] = br.price
        points.append(BRPoint(it, player, br.price, br.payoff))
    return BRTrajectory(tuple(points), pp, metric, pp.beta, pp.alpha, (float(init[0]), float(init[1])))


def trajectory_payoffs_consistent(traj: BRTrajectory, model: PriceModel, tol: float = 1e-8) -> bool:
    """Recompute each recorded payoff from the price pair it was played against."""
    prices = list(traj.init)
    for pt in traj.points:
        prices[pt.player - 1] = pt.price
        pays = payoffs_at_we(traj.params, model, traj.metric, prices[0], prices[1])
        if abs(pays[pt.player - 1] - pt.payoff) > tol * max(1.0, abs(pt.payoff)):
            return False
    return True


@dataclass(frozen=True)
class Converged:
    point: float
    kind: str = field(default="Converged", init=False)


@dataclass(frozen=True)
class Oscillating:
    min: float
    max: float
    period: int
    kind: str = field(default="Oscillating", init=False)


def _period(x):
    x = np.asarray(x, dtype=float)
    corr = []
    for lag in range(1, x.size // 2 + 1):
        a, b = x[:-lag], x[lag:]
        corr.append(-np.inf if a.std() == 0 or b.std() == 0 else float(np.corrcoef(a, b)[0, 1]))
    corr = np.array(corr)
    # skip the initial high-correlation run (a sawtooth is smooth at lag 1), then
    # take the smallest lag attaining the maximum, so a 2-cycle reports 2 not 4
    dips = np.flatnonzero(corr <= 0)
    if dips.size == 0:
        return 0
    rest = corr[dips[0]:]
    return int(dips[0] + np.flatnonzero(rest >= rest.max() - 1e-9)[0]) + 1


def classify_trajectory(traj, burn_in: int, tol: float):
    """``Converged`` if the post-burn-in price range is below ``tol``, else ``Oscillating``.

    ``traj`` may be a :class:`BRTrajectory` or a plain price sequence. The period is
    read off the autocorrelation of the tail; 0 means no repeat was detected.
    """
    x = traj.prices() if isinstance(traj, BRTrajectory) else np.asarray(traj, dtype=float)
    if burn_in < 0 or burn_in >= x.size - 1:
        raise DomainError(f"trajectory of length {x.size} is too short for burn-in {burn_in}")
    tail = x[burn_in:]
    lo, hi = float(tail.min()), float(tail.max())
    if hi - lo < tol:
        return Converged(float(tail[-1]))
    return Oscillating(lo, hi, _period(tail))
