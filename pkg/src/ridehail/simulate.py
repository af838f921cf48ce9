"""Event-driven simulation of a platform's driver queue.

State is ``(n, r)``: drivers waiting and drivers away (on a ride or on an
off-platform break after abandoning). Events:

* passenger arrival at rate ``lam``; accepts the price with probability ``f(phi)``
  and is matched to a waiting driver if ``n > 0``,
* driver arrival at rate ``eta``,
* abandonment at rate ``n * beta`` (the driver moves to the away station),
* return from the away station at rate ``r * nu``; rejoin with probability ``p``.

``horizon`` counts events, not time. Random numbers come from a
:class:`numpy.random.Generator` seeded through :class:`numpy.random.SeedSequence`;
each run spawns three child streams (holding times, event selection, marks).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, RegimeError
from .queueing import MarketParams, blocking, revenue_rate, unavailability
from .sensitivity import PriceModel, eval_f
from .wardrop import QosMetric, solve_we

N_BATCHES = 32
WARMUP = 0.1
_CHUNK = 1 << 16


class TransienceWarning(RuntimeWarning):
    """The waiting-driver queue drifted past the monitoring cap."""


@dataclass(frozen=True)
class Estimate:
    value: float
    half_width: float

    def covers(self, target: float, k: float = 3.0) -> bool:
        """True when ``target`` lies within ``k`` half-widths (k=3 on a 95% half-width is generous)."""
        return abs(self.value - target) <= k * self.half_width


@dataclass(frozen=True)
class SimEstimates:
    u_hat: Estimate  # fraction of passenger arrivals that find no waiting driver
    u_time_hat: Estimate  # time-average fraction with no waiting driver
    b_hat: Estimate
    revenue_rate_hat: Estimate
    n_marginal: np.ndarray  # time-weighted occupancy of n after warm-up
    n_snapshots: np.ndarray  # counts of n sampled on a fixed time lattice
    events: int
    horizon: float  # simulated time
    stationary: bool = True

    def to_dict(self) -> dict:
        out = {}
        for name in ("u_hat", "u_time_hat", "b_hat", "revenue_rate_hat"):
            out[name] = asdict(getattr(self, name))
        out["n_marginal"] = [float(v) for v in self.n_marginal]
        out["n_snapshots"] = [int(v) for v in self.n_snapshots]
        out["events"] = self.events
        out["horizon"] = self.horizon
        out["stationary"] = self.stationary
        return out


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed) & 0xFFFF_FFFF_FFFF_FFFF)


class _Streams:
    """Chunked draws from three independent child streams."""

    def __init__(self, seed):
        clocks, picks, marks = (np.random.default_rng(s) for s in _seed_sequence(seed).spawn(3))
        self._gens = (clocks, picks, marks)
        self._buf = [[], [], []]
        self._pos = [0, 0, 0]

    def _refill(self, i):
        gen = self._gens[i]
        self._buf[i] = (gen.standard_exponential(_CHUNK) if i == 0 else gen.random(_CHUNK)).tolist()
        self._pos[i] = 0

    def take(self, i):
        if self._pos[i] >= len(self._buf[i]):
            self._refill(i)
        v = self._buf[i][self._pos[i]]
        self._pos[i] += 1
        return v


def _batch_estimate(values) -> Estimate:
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    return Estimate(mean, float(stats.t.ppf(0.975, values.size - 1)) * sd / math.sqrt(values.size))


def simulate_platform(params: MarketParams, model: PriceModel, lam: float, phi: float, horizon: int, seed,
                      snapshot_dt: float = 10.0, n_cap: int = 100_000) -> SimEstimates:
    """Simulate one platform for ``horizon`` events and estimate its QoS and revenue rate.

    Intervals are 95% batch-means intervals (32 batches after discarding the first
    10% of events). Snapshots of ``n`` are taken every ``snapshot_dt`` time units,
    which keeps them close to independent for goodness-of-fit tests.
    """
    horizon = int(horizon)
    if horizon < 10 * N_BATCHES:
        raise DomainError(f"horizon must be at least {10 * N_BATCHES} events")
    if lam < 0 or not math.isfinite(lam):
        raise DomainError("lam must be finite and non-negative")
    f = eval_f(model, phi)
    eta, beta, nu, p = params.eta, params.beta, params.nu, params.p
    rs = _Streams(seed)

    warm = int(WARMUP * horizon)
    per_batch = (horizon - warm) // N_BATCHES
    horizon = warm + per_batch * N_BATCHES

    arrivals = np.zeros(N_BATCHES)
    empty_seen = np.zeros(N_BATCHES)
    blocked = np.zeros(N_BATCHES)
    revenue = np.zeros(N_BATCHES)
    btime = np.zeros(N_BATCHES)
    empty_time = np.zeros(N_BATCHES)
    occupancy: dict[int, float] = {}
    snaps: dict[int, int] = {}

    n = r = 0
    t = 0.0
    t_start = 0.0
    next_snap = 0.0
    stationary = True
    batch = -1
    for k in range(horizon):
        if k >= warm and (k - warm) % per_batch == 0:
            batch += 1
            if batch == 0:
                t_start = t
                next_snap = t
        rate = lam + eta + n * beta + r * nu
        dt = rs.take(0) / rate
        if batch >= 0:
            btime[batch] += dt
            occupancy[n] = occupancy.get(n, 0.0) + dt
            if n == 0:
                empty_time[batch] += dt
            while next_snap < t + dt:
                snaps[n] = snaps.get(n, 0) + 1
                next_snap += snapshot_dt
        t += dt
        u = rs.take(1) * rate
        if u < lam:
            accept = rs.take(2) < f
            if batch >= 0:
                arrivals[batch] += 1
                if n == 0:
                    empty_seen[batch] += 1
                if not accept or n == 0:
                    blocked[batch] += 1
                else:
                    revenue[batch] += phi
            if accept and n > 0:
                n -= 1
                r += 1
        elif u < lam + eta:
            n += 1
            if n > n_cap and stationary:
                stationary = False
                warnings.warn(f"waiting drivers exceeded {n_cap}; the queue looks transient",
                              TransienceWarning, stacklevel=2)
        elif u < lam + eta + n * beta:
            n -= 1
            r += 1
        else:
            r -= 1
            if rs.take(2) < p:
                n += 1

    with np.errstate(invalid="ignore", divide="ignore"):
        u_time = empty_time / btime
        u_seen = np.where(arrivals > 0, empty_seen / np.maximum(arrivals, 1), u_time)
        b_seen = np.where(arrivals > 0, blocked / np.maximum(arrivals, 1), 1.0 - f + f * u_time)
    total = float(btime.sum())
    n_top = max(occupancy) if occupancy else 0
    marginal = np.zeros(n_top + 1)
    for key, v in occupancy.items():
        marginal[key] = v / total
    snap_counts = np.zeros(max(snaps) + 1 if snaps else 1, dtype=np.int64)
    for key, v in snaps.items():
        snap_counts[key] = v
    return SimEstimates(
        u_hat=_batch_estimate(u_seen),
        u_time_hat=_batch_estimate(u_time),
        b_hat=_batch_estimate(b_seen),
        revenue_rate_hat=_batch_estimate(revenue / btime),
        n_marginal=marginal,
        n_snapshots=snap_counts,
        events=horizon,
        horizon=t - t_start,
        stationary=stationary,
    )


def analytic_targets(params: MarketParams, model: PriceModel, lam: float, phi: float) -> dict:
    """Product-form values the simulation estimates should reproduce."""
    return {
        "u": float(unavailability(params, model, lam, phi)),
        "b": float(blocking(params, model, lam, phi)),
        "revenue_rate": float(revenue_rate(params, model, lam, phi)),
    }


@dataclass(frozen=True)
class CouplingReport:
    events: int
    violations: int
    first_violation: int | None
    max_gap_n: int  # largest observed n_lo - n_hi
    lambda_lo: float
    lambda_hi: float

    @property
    def dominant(self) -> bool:
        return self.violations == 0


def simulate_coupled(params: MarketParams, model: PriceModel, lambda_lo: float, lambda_hi: float, phi: float,
                     horizon: int, seed) -> CouplingReport:
    """Run two copies that differ only in passenger rate on one probability space.

    The higher-rate copy sees every passenger; the lower-rate copy keeps each one
    with probability ``lambda_lo / lambda_hi``. Driver arrivals are common. The
    first ``min(n, n~)`` patience clocks and the first ``min(r, r~)`` away clocks
    are shared, as are acceptance and rejoin draws. The joint process is itself a
    Markov chain with total rate ``lambda_hi + eta + beta max(n, n~) + nu max(r, r~)``,
    so simultaneous events arise only where the construction intends them.

    Counts epochs where ``n_hi <= n_lo`` or ``n_hi + r_hi <= n_lo + r_lo`` fails.
    """
    if not 0 <= lambda_lo <= lambda_hi:
        raise DomainError("need 0 <= lambda_lo <= lambda_hi")
    if lambda_hi <= 0:
        raise DomainError("lambda_hi must be positive")
    if params.beta <= 0:
        raise RegimeError("the coupled simulation needs beta > 0")
    f = eval_f(model, phi)
    eta, beta, nu, p = params.eta, params.beta, params.nu, params.p
    keep = lambda_lo / lambda_hi
    rs = _Streams(seed)
    nh = rh = nl = rl = 0
    violations = 0
    first = None
    max_gap = 0
    horizon = int(horizon)
    for k in range(horizon):
        nmax = nh if nh > nl else nl
        rmax = rh if rh > rl else rl
        rate = lambda_hi + eta + nmax * beta + rmax * nu
        u = rs.take(1) * rate
        if u < lambda_hi:
            accept = rs.take(2) < f
            seen = rs.take(2) < keep
            if accept and nh > 0:
                nh -= 1
                rh += 1
            if accept and seen and nl > 0:
                nl -= 1
                rl += 1
        elif u < lambda_hi + eta:
            nh += 1
            nl += 1
        elif u < lambda_hi + eta + nmax * beta:
            idx = min(int((u - lambda_hi - eta) / beta), nmax - 1)
            if idx < nh:
                nh -= 1
                rh += 1
            if idx < nl:
                nl -= 1
                rl += 1
        else:
            idx = min(int((u - lambda_hi - eta - nmax * beta) / nu), rmax - 1)
            back = rs.take(2) < p
            if idx < rh:
                rh -= 1
                nh += back
            if idx < rl:
                rl -= 1
                nl += back
        if nh > nl or nh + rh > nl + rl:
            violations += 1
            if first is None:
                first = k
        if nl - nh > max_gap:
            max_gap = nl - nh
    return CouplingReport(horizon, violations, first, max_gap, float(lambda_lo), float(lambda_hi))


@dataclass(frozen=True)
class DuopolySim:
    lambda1: float
    lambda2: float
    platform1: SimEstimates
    platform2: SimEstimates
    qos_gap: float  # simulated QoS of platform 1 minus platform 2
    qos_gap_half_width: float
    metric: QosMetric = field(default=QosMetric.BLOCKING)

    def to_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "metric": self.metric.value,
            "qos_gap": self.qos_gap,
            "qos_gap_half_width": self.qos_gap_half_width,
            "platform1": self.platform1.to_dict(),
            "platform2": self.platform2.to_dict(),
        }


def simulate_duopoly(params: MarketParams, model: PriceModel, phi1: float, phi2: float, metric, horizon: int,
                     seed) -> DuopolySim:
    """Split passengers by the Wardrop equilibrium, then simulate both platforms independently."""
    metric = QosMetric.parse(metric)
    if params.beta <= 0:
        raise RegimeError("simulate_duopoly needs beta > 0")
    if metric is QosMetric.DELAY:
        raise DomainError("the simulator estimates unavailability and blocking only")
    split = solve_we(params, model, metric, phi1, phi2)
    s1, s2 = _seed_sequence(seed).spawn(2)
    a = simulate_platform(params, model, split.lambda1, phi1, horizon, s1)
    b = simulate_platform(params, model, split.lambda2, phi2, horizon, s2)
    ea, eb = (a.u_hat, b.u_hat) if metric is QosMetric.UNAVAILABILITY else (a.b_hat, b.b_hat)
    return DuopolySim(split.lambda1, split.lambda2, a, b, ea.value - eb.value,
                      math.hypot(ea.half_width, eb.half_width), metric)
