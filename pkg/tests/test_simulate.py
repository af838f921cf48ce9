import math
import warnings

import numpy as np
import pytest
from scipy import stats

from ridehail import DomainError, MarketParams, Quadratic, RegimeError, eval_f, eval_f_inverse
from ridehail import simulate as sim
from ridehail.wardrop import QosMetric

M = Quadratic(0.1, 9.0)


def stationary_n(params, x, n_max):
    """pi_n for the waiting-driver count, by direct product of the birth-death ratios."""
    mu = np.cumprod([1.0] + [params.e / (x + k * params.beta) for k in range(1, n_max + 1)])
    return mu / mu.sum()


def test_horizon_floor_and_bad_rates():
    params = MarketParams.from_e(2.0, 1.0, beta=1.0)
    with pytest.raises(DomainError):
        sim.simulate_platform(params, M, 1.0, 0.0, 100, seed=0)
    with pytest.raises(DomainError):
        sim.simulate_platform(params, M, -1.0, 0.0, 10_000, seed=0)


def test_no_passengers_means_no_revenue():
    params = MarketParams.from_e(2.0, 1.0, beta=1.0)
    est = sim.simulate_platform(params, M, 0.0, 4.0, 200_000, seed=1)
    assert est.revenue_rate_hat.value == 0.0
    assert est.u_hat.covers(math.exp(-1.0), 3.0)


def test_pasta_arrivals_see_time_averages():
    params = MarketParams.from_e(2.0, 1.0, beta=0.5)
    est = sim.simulate_platform(params, M, 1.5, eval_f_inverse(M, 0.8), 400_000, seed=7)
    gap = abs(est.u_hat.value - est.u_time_hat.value)
    assert gap <= 3 * math.hypot(est.u_hat.half_width, est.u_time_hat.half_width)


def test_renewal_reward_identity():
    params = MarketParams.from_e(2.0, 1.0, beta=2.0)
    phi = eval_f_inverse(M, 0.6)
    est = sim.simulate_platform(params, M, 3.0, phi, 400_000, seed=11)
    implied = 3.0 * 0.6 * phi * (1 - est.u_hat.value)
    assert abs(est.revenue_rate_hat.value - implied) <= 3 * (est.revenue_rate_hat.half_width
                                                              + 3.0 * 0.6 * phi * est.u_hat.half_width)


@pytest.mark.parametrize("beta,seed", [(0.5, 101), (1.0, 102), (2.0, 103)])
def test_snapshot_marginal_fits_product_form(beta, seed):
    params = MarketParams.from_e(2.0, 1.0, beta=beta)
    x = 1.5 * 0.8
    est = sim.simulate_platform(params, M, 1.5, eval_f_inverse(M, 0.8), 600_000, seed=seed)
    counts = est.n_snapshots.astype(float)
    total = counts.sum()
    probs = stationary_n(params, x, 200)
    expected = probs[:counts.size] * total
    keep = int(np.flatnonzero(expected >= 5)[-1]) + 1
    obs = np.append(counts[:keep], counts[keep:].sum())
    exp = np.append(expected[:keep], total - expected[:keep].sum())
    p_value = stats.chisquare(obs, exp).pvalue
    assert p_value > 1e-3, (p_value, obs, exp)


def test_time_marginal_matches_product_form():
    params = MarketParams.from_e(2.0, 1.0, beta=1.0)
    est = sim.simulate_platform(params, M, 2.0, eval_f_inverse(M, 0.75), 400_000, seed=5)
    probs = stationary_n(params, 1.5, est.n_marginal.size - 1)
    assert np.abs(est.n_marginal - probs).max() < 0.01


def test_seed_determinism():
    params = MarketParams.from_e(2.0, 1.0, beta=1.0)
    a = sim.simulate_platform(params, M, 1.0, 3.0, 20_000, seed=42).to_dict()
    b = sim.simulate_platform(params, M, 1.0, 3.0, 20_000, seed=42).to_dict()
    c = sim.simulate_platform(params, M, 1.0, 3.0, 20_000, seed=43).to_dict()
    assert a == b and a != c


def test_wide_and_negative_seeds():
    params = MarketParams.from_e(2.0, 1.0, beta=1.0)
    for seed in (2**64 + 5, -3, 2**63):
        est = sim.simulate_platform(params, M, 1.0, 3.0, 5_000, seed=seed)
        assert 0 <= est.u_hat.value <= 1
    wrapped = sim.simulate_platform(params, M, 1.0, 3.0, 5_000, seed=2**64 + 5).to_dict()
    assert wrapped == sim.simulate_platform(params, M, 1.0, 3.0, 5_000, seed=5).to_dict()


def test_transience_warning():
    params = MarketParams.from_e(0.5, 2.0, beta=0.01)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = sim.simulate_platform(params, M, 0.5, 0.0, 20_000, seed=3, n_cap=20)
    assert any(issubclass(w.category, sim.TransienceWarning) for w in caught)
    assert not est.stationary


def test_estimate_covers():
    e = sim.Estimate(1.0, 0.1)
    assert e.covers(1.25) and not e.covers(1.35)


def test_coupling_with_equal_rates_is_identical():
    params = MarketParams.from_e(2.0, 1.0, beta=0.5)
    rep = sim.simulate_coupled(params, M, 1.5, 1.5, 2.0, 50_000, seed=9)
    assert rep.dominant and rep.max_gap_n == 0


def test_coupling_shows_a_gap_and_needs_abandonment():
    params = MarketParams.from_e(2.0, 1.0, beta=0.5)
    rep = sim.simulate_coupled(params, M, 0.5, 2.5, 2.0, 50_000, seed=9)
    assert rep.dominant and rep.max_gap_n > 0 and rep.first_violation is None
    with pytest.raises(RegimeError):
        sim.simulate_coupled(MarketParams.from_e(2.0, 1.0), M, 0.5, 2.5, 2.0, 1000, seed=0)


def test_duopoly_symmetric_prices():
    params = MarketParams.from_e(2.0, 1.0, beta=0.5)
    run = sim.simulate_duopoly(params, M, 4.0, 4.0, QosMetric.BLOCKING, 200_000, seed=4)
    assert run.lambda1 == run.lambda2 == 1.0
    assert abs(run.qos_gap) <= 3 * run.qos_gap_half_width


def test_duopoly_unavailability_split():
    params = MarketParams.from_e(2.0, 1.0, beta=0.5)
    run = sim.simulate_duopoly(params, M, eval_f_inverse(M, 0.75), 0.0, "u", 200_000, seed=8)
    assert run.lambda1 == pytest.approx(2 / 1.75, abs=1e-8)
    assert abs(run.qos_gap) <= 3 * run.qos_gap_half_width
    assert run.to_dict()["metric"] == "unavailability"


def test_duopoly_rejects_delay_and_idp():
    with pytest.raises(DomainError):
        sim.simulate_duopoly(MarketParams.from_e(2.0, 1.0, beta=0.5, alpha=0.2), M, 1.0, 2.0, "delay", 1000, 0)
    with pytest.raises(RegimeError):
        sim.simulate_duopoly(MarketParams.from_e(2.0, 1.0), M, 1.0, 2.0, "b", 1000, 0)


@pytest.mark.slow
def test_duopoly_recovers_limiting_payoffs_for_patient_drivers():
    params = MarketParams.from_e(2.0, 1.0, beta=0.001)
    run = sim.simulate_duopoly(params, M, 5.0, 1.0, QosMetric.BLOCKING, 10**6, seed=3)
    # limiting payoffs (Lambda f(5) - e) * 5 = 2.5 and e * 1 = 1.0
    assert run.platform1.revenue_rate_hat.covers((2 * eval_f(M, 5.0) - 1) * 5.0, 3.0)
    assert run.platform2.revenue_rate_hat.covers(1.0, 3.0)
