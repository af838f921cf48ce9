import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from ridehail import ConfigError, DomainError, Linear, Quadratic, Sqrt, Tabulated
from ridehail.sensitivity import (
    eval_f,
    eval_f_inverse,
    eval_f_prime,
    model_from_config,
    phi_f_prime,
    validate_assumptions,
)


def test_quadratic_value(quad):
    assert eval_f(quad, 5.0) == pytest.approx(0.75, abs=1e-15)


def test_quadratic_at_zero_acceptance_fails_validation():
    report = validate_assumptions(Quadratic(0.1, 10.0))
    assert not report["positivity"].passed
    assert report["positivity"].first_violation == pytest.approx(10.0)


def test_positivity_violation_near_ten():
    report = validate_assumptions(Quadratic(0.1, 10.5), 1000)
    assert not report.ok
    assert abs(report["positivity"].first_violation - 10.0) < 0.02


def test_valid_quadratic_passes_everything(quad):
    report = validate_assumptions(quad, 1000)
    assert report.ok
    assert [c.name for c in report.checks] == ["positivity", "f(0)=1", "strictly decreasing", "strictly concave"]


def test_convex_table_fails_concavity():
    phi = np.linspace(0, 5, 11)
    report = validate_assumptions(Tabulated(tuple(phi), tuple(np.exp(-phi / 3))))
    assert report["positivity"].passed and report["strictly decreasing"].passed
    assert not report["strictly concave"].passed


def test_linear_is_not_strictly_concave():
    assert not validate_assumptions(Linear(0.05, 9.0))["strictly concave"].passed


def test_grid_points_floor(quad):
    with pytest.raises(DomainError):
        validate_assumptions(quad, 2)


def test_inverse_examples(quad):
    assert eval_f_inverse(quad, 1.0) == 0.0
    assert eval_f_inverse(quad, 1.5) == 0.0
    oracle = optimize.bisect(lambda t: 1 - (0.1 * t) ** 2 - 0.4, 0, 9, xtol=1e-14)
    assert eval_f_inverse(quad, 0.4) == pytest.approx(oracle, abs=1e-10)
    assert eval_f_inverse(quad, 0.4) == pytest.approx(7.745966, abs=1e-6)


def test_inverse_branches(quad):
    f_top = eval_f(quad, 9.0)
    assert eval_f_inverse(quad, f_top / 2) == 9.0
    assert eval_f_inverse(quad, f_top) == pytest.approx(9.0, abs=1e-12)
    with pytest.raises(DomainError):
        eval_f_inverse(quad, -0.1)


def test_derivative_examples(quad):
    h = 1e-6
    fd = (eval_f(quad, 5 + h) - eval_f(quad, 5 - h)) / (2 * h)
    assert eval_f_prime(quad, 5.0) == pytest.approx(-0.1, abs=1e-12)
    assert eval_f_prime(quad, 5.0) == pytest.approx(fd, abs=1e-8)
    assert eval_f_prime(quad, 0.0) == 0.0
    assert eval_f_prime(Linear(0.07, 9.0), 3.3) == pytest.approx(-0.07)


def test_sqrt_slope_product_is_finite_at_zero():
    model = Sqrt(100.0, 9.0)
    assert phi_f_prime(model, 0.0) == 0.0
    assert math.isinf(eval_f_prime(model, 0.0))
    assert phi_f_prime(model, 4.0) == pytest.approx(4.0 * eval_f_prime(model, 4.0))


def test_domain_is_enforced(quad):
    with pytest.raises(DomainError):
        eval_f(quad, 9.5)
    with pytest.raises(DomainError):
        eval_f_prime(quad, -1.0)


def test_arrays_in_arrays_out(quad):
    out = eval_f(quad, np.array([0.0, 5.0]))
    assert isinstance(out, np.ndarray) and out.tolist() == pytest.approx([1.0, 0.75])


def test_tabulated_hits_nodes_and_derivative():
    phi = np.linspace(0, 9, 19)
    model = Tabulated(tuple(phi), tuple(1 - (0.1 * phi) ** 2))
    assert model.phi_h == 9.0
    assert eval_f(model, phi[7]) == pytest.approx(1 - (0.1 * phi[7]) ** 2, abs=1e-14)
    assert eval_f_prime(model, 5.0) == pytest.approx(-0.1, abs=1e-3)
    assert validate_assumptions(model).ok


@pytest.mark.parametrize("bad", [
    {"family": "cubic"},
    {"family": "quadratic", "a": 0.1},
    {"family": "quadratic", "a": -1, "phi_h": 9},
    {"family": "tabulated", "phi": [0, 1], "f": [1, 0.5]},
    {"family": "tabulated", "phi": [0.5, 1, 2], "f": [1, 0.9, 0.5]},
    "quadratic",
])
def test_bad_fragments(bad):
    with pytest.raises(ConfigError):
        model_from_config(bad)


@pytest.mark.parametrize("model", [
    Quadratic(0.1, 9.0),
    Linear(0.05, 9.0),
    Sqrt(100.0, 9.0),
    Tabulated((0.0, 1.0, 2.0), (1.0, 0.9, 0.6)),
])
def test_config_round_trip(model):
    assert model_from_config(model.to_config()) == model


quad_models = st.builds(
    lambda a, frac: Quadratic(a, frac / a),
    st.floats(0.01, 2.0),
    st.floats(0.1, 0.99),
)


@settings(max_examples=60, deadline=None)
@given(quad_models, st.floats(0.0, 1.0))
def test_inverse_round_trip(model, t):
    lo = eval_f(model, model.phi_h)
    x = lo + t * (1 - lo)
    assert eval_f(model, eval_f_inverse(model, x)) == pytest.approx(x, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(quad_models)
def test_inverse_non_increasing(model):
    xs = np.linspace(0, 1.2, 60)
    inv = [eval_f_inverse(model, x) for x in xs]
    assert all(a >= b for a, b in zip(inv, inv[1:]))


@settings(max_examples=40, deadline=None)
@given(st.one_of(quad_models, st.builds(lambda s: Sqrt(s, 0.9 * s), st.floats(1.0, 100.0))), st.floats(0.05, 0.95))
def test_derivative_matches_finite_difference(model, t):
    phi = t * model.phi_h
    h = 1e-6 * model.phi_h
    fd = (eval_f(model, phi + h) - eval_f(model, phi - h)) / (2 * h)
    assert eval_f_prime(model, phi) == pytest.approx(fd, rel=1e-6, abs=1e-9)
