import csv
import io
import json

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from ridehail import MarketParams, NumericalError, Quadratic
from ridehail import cli
from ridehail.wardrop import we_idp


def write(tmp_path, doc, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc) if isinstance(doc, dict) else doc)
    return str(path)


QUAD = {"family": "quadratic", "a": 0.1, "phi_h": 9.0}
FIG5 = {"market": {"Lambda": 2.0, "e": 1.0}, "model": QUAD}


def run_csv(capsys, argv):
    code = cli.run(argv)
    out = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(out.out))) if code == 0 else []
    return code, rows, out


def test_we_rows_match_library(tmp_path, capsys):
    doc = dict(FIG5, options={"prices": [[4.0, 4.0], [5.0, 1.0], [8.0, 1.0]]})
    code, rows, _ = run_csv(capsys, ["we", "--config", write(tmp_path, doc)])
    assert code == 0 and len(rows) == 3
    assert float(rows[0]["lambda1"]) == float(rows[0]["lambda2"]) == 1.0
    params, model = MarketParams.from_e(2.0, 1.0), Quadratic(0.1, 9.0)
    for row in rows[1:]:
        split = we_idp(params, model, "b", float(row["phi1"]), float(row["phi2"]))
        assert float(row["lambda1"]) == pytest.approx(split.lambda1, rel=1e-11)
    assert float(rows[1]["M1"]) == pytest.approx(2.5) and float(rows[1]["M2"]) == pytest.approx(1.0)


def test_csv_has_header_and_twelve_digits(tmp_path, capsys):
    doc = dict(FIG5, options={"prices": [5.0, 1.0]})
    code = cli.run(["we", "--config", write(tmp_path, doc)])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0 and lines[0] == "phi1,phi2,lambda1,lambda2,gap,M1,M2"
    assert lines[1].split(",")[2] == "0.666666666667"


@pytest.mark.parametrize("text", [
    "market: [unclosed",
    "market: {Lambda: 2}\nmodel: {family: quadratic, a: 0.1, phi_h: 9}\n",
    "market: {Lambda: 2, e: 1, rho: 0.5}\nmodel: {family: quadratic, a: 0.1, phi_h: 9}\n",
    "market: {Lambda: 2, e: 1}\nmodel: {family: cubic}\n",
    "market: {Lambda: 2, e: 1}\nmodel: {family: quadratic, a: 0.1, phi_h: 9}\ncolour: blue\n",
    "market: {Lambda: 2, e: 1}\nmodel: {family: tabulated, file: missing.csv}\n",
    "market: {Lambda: 2, e: 1}\nmodel: {family: quadratic, a: 0.1, phi_h: 9}\nsweep: {variable: rho, start: 0, stop: 1, steps: 5}\n",
])
def test_malformed_config_exits_2(tmp_path, capsys, text):
    code = cli.run(["compare", "--config", write(tmp_path, text)])
    assert code == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    assert cli.run(["compare", "--config", str(tmp_path / "nope.yaml")]) == cli.EXIT_CONFIG


def test_regime_error_exits_3(tmp_path, capsys):
    doc = dict(FIG5, market={"Lambda": 2.0, "e": 1.0, "beta": 0.1}, options={"phi1": 1.0, "phi2": 2.0},
               metric="delay")
    doc["market"]["alpha"] = 0.2
    assert cli.run(["simulate", "--config", write(tmp_path, doc)]) == cli.EXIT_REGIME
    assert "precondition" in capsys.readouterr().err


def test_numerical_error_exits_4(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise NumericalError("series failed to converge")

    monkeypatch.setattr(cli.equilibria, "compare_regimes", boom)
    assert cli.run(["compare", "--config", write(tmp_path, FIG5)]) == cli.EXIT_NUMERICAL


def test_simulate_is_byte_identical(tmp_path, capsys):
    doc = {"market": {"Lambda": 2.0, "e": 1.0, "beta": 1.0}, "model": QUAD,
           "options": {"lam": 1.5, "phi": 4.0, "horizon": 20000}, "seed": 17}
    path = write(tmp_path, doc)
    outs = []
    for _ in range(2):
        assert cli.run(["simulate", "--config", path]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert data["seed"] == 17 and "analytic" in data["estimates"]
    assert cli.run(["simulate", "--config", path, "--seed", "18"]) == 0
    assert capsys.readouterr().out != outs[0]


def test_simulate_duopoly_csv(tmp_path, capsys):
    doc = {"market": {"Lambda": 2.0, "e": 1.0, "beta": 0.5}, "model": QUAD,
           "options": {"phi1": 4.0, "phi2": 4.0, "horizon": 5000}}
    code, rows, _ = run_csv(capsys, ["simulate", "--config", write(tmp_path, doc), "--format", "csv"])
    values = {r["quantity"]: r["value"] for r in rows}
    assert code == 0 and float(values["lambda1"]) == 1.0 and "platform1.b_hat.value" in values


def test_equilibria_on_cycle_parameters(tmp_path, capsys):
    assert cli.run(["equilibria", "--config", write(tmp_path, FIG5)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["regime"] == "PassengerScarce"
    ec = data["equilibrium_cycle"]
    assert ec["passed"] and ec["interval"] == pytest.approx([2.7217, 4.0825], abs=1e-4)
    assert data["security"]["value"] == pytest.approx(2.7217, abs=1e-4)
    kinds = [r["kind"] for r in data["rows"]]
    assert "MixedNE" in kinds


def test_equilibria_saturated_market(tmp_path, capsys):
    doc = dict(FIG5, market={"Lambda": 1.0, "rho": 1.2})
    assert cli.run(["equilibria", "--config", write(tmp_path, doc)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["regime"] == "Saturated" and data["eps"] == 0.01
    assert data["rows"][-1]["payoff"] == "nan"


def test_compare_flags(tmp_path, capsys):
    assert cli.run(["compare", "--config", write(tmp_path, FIG5), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["all_dominance"] is True
    assert [r["regime"] for r in data["rows"]] == ["Monopoly", "Duopoly-U", "Duopoly-B", "Cooperative"]


def test_sweep_rho_defaults(capsys):
    code, rows, _ = run_csv(capsys, ["sweep-rho"])
    assert code == 0 and len(rows) == 50
    for r in rows:
        if float(r["rho"]) >= 1:
            assert float(r["duopoly_b_payoff"]) == 0.0 and r["duopoly_b_regime"] == "Saturated"
        assert r["dominance"] == "true"
    pays = [float(r["monopoly_payoff"]) for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(pays, pays[1:]))
    assert pays[-1] == pytest.approx(pays[-2])  # saturated


def test_sweep_rho_half_row(tmp_path, capsys):
    doc = {"sweep": {"variable": "rho", "start": 0.5, "stop": 1.5, "steps": 3}}
    code, rows, _ = run_csv(capsys, ["sweep-rho", "--config", write(tmp_path, doc), "--threads", "2"])
    half = rows[0]
    assert code == 0 and float(half["rho"]) == 0.5
    assert float(half["duopoly_b_phi_L"]) == pytest.approx(2.7217, abs=1e-4)
    assert float(half["duopoly_b_phi_R"]) == pytest.approx(4.0825, abs=1e-4)
    assert float(half["duopoly_b_payoff"]) == pytest.approx(4.0825 / 3, abs=1e-4)
    assert half["duopoly_b_price"] == "nan"


def test_sweep_rho_rejects_other_variables(tmp_path, capsys):
    doc = {"sweep": {"variable": "beta", "start": 0.0, "stop": 1.0, "steps": 3}}
    assert cli.run(["sweep-rho", "--config", write(tmp_path, doc)]) == cli.EXIT_CONFIG


def test_br_command(tmp_path, capsys):
    doc = {"market": {"Lambda": 1.0, "e": 0.3}, "model": QUAD,
           "options": {"init": [1.0, 1.0], "iters": 6, "grid_n": 400, "burn_in": 3, "tol": 0.01}}
    assert cli.run(["br", "--config", write(tmp_path, doc), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["rows"]) == 6 and data["classification"]["kind"] == "Converged"


def test_validate_model_exit_codes(tmp_path, capsys):
    good = write(tmp_path, FIG5, "good.yaml")
    bad = write(tmp_path, dict(FIG5, model={"family": "quadratic", "a": 0.1, "phi_h": 10.0}), "bad.yaml")
    assert cli.run(["validate-model", "--config", good]) == 0
    capsys.readouterr()
    assert cli.run(["validate-model", "--config", bad]) == cli.EXIT_REGIME
    assert "positivity,false" in capsys.readouterr().out


def test_tabulated_curve_from_file(tmp_path, capsys):
    (tmp_path / "curve.csv").write_text("phi,f\n0,1\n3,0.91\n6,0.64\n9,0.19\n")
    doc = dict(FIG5, model={"family": "tabulated", "file": "curve.csv"}, options={"prices": [4.0, 4.0]})
    code, rows, _ = run_csv(capsys, ["we", "--config", write(tmp_path, doc)])
    assert code == 0 and float(rows[0]["lambda1"]) == 1.0


def test_output_destinations(tmp_path, capsys, monkeypatch):
    path = write(tmp_path, FIG5)
    monkeypatch.setenv("RIDEHAIL_OUT_DIR", str(tmp_path / "out"))
    assert cli.run(["compare", "--config", path]) == 0
    assert (tmp_path / "out" / "compare.csv").read_text().startswith("regime,")
    assert cli.run(["compare", "--config", path, "--out", "-"]) == 0
    assert capsys.readouterr().out.startswith("regime,")
    target = tmp_path / "explicit.json"
    assert cli.run(["compare", "--config", path, "--out", str(target), "--format", "json"]) == 0
    assert json.loads(target.read_text())["config"]["metric"] == "blocking"


def test_thread_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RIDEHAIL_THREADS", "zero")
    assert cli.run(["sweep-rho"]) == cli.EXIT_CONFIG
    monkeypatch.setenv("RIDEHAIL_THREADS", "3")
    assert cli.run(["sweep-rho"]) == 0


def test_main_exits_with_status(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["compare", "--config", str(tmp_path / "nope.yaml")])
    assert info.value.code == cli.EXIT_CONFIG


markets = st.fixed_dictionaries(
    {"Lambda": st.floats(0.1, 10.0), "e": st.floats(0.05, 10.0)},
    optional={"beta": st.floats(0.0, 5.0), "alpha": st.floats(0.0, 0.95), "p": st.floats(0.0, 0.9),
              "nu": st.floats(0.1, 5.0), "N_bar": st.integers(1, 200)},
)


@settings(max_examples=50, deadline=None)
@given(markets, st.sampled_from(["blocking", "unavailability", "delay"]), st.integers(-2**40, 2**40),
       st.one_of(st.none(), st.builds(lambda a, b, n: {"variable": "rho", "start": a, "stop": b, "steps": n},
                                      st.floats(0.01, 1.0), st.floats(1.0, 3.0), st.integers(1, 60))))
def test_config_echo_round_trips(market, metric, seed, sweep):
    raw = {"market": market, "model": QUAD, "metric": metric, "seed": seed, "options": {"prices": [1.0, 2.0]}}
    if sweep:
        raw["sweep"] = sweep
    cfg = cli.config_from_dict(raw)
    echoed = json.loads(json.dumps(cfg.to_dict()))
    again = cli.config_from_dict(echoed)
    assert again == cfg
