"""Command-line front end.

Every subcommand reads a YAML (or JSON) scenario file and writes a CSV or JSON
table. Exit status: 0 success, 2 configuration error, 3 regime or precondition
error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import dynamics, equilibria, simulate, wardrop
from .errors import ConfigError, DomainError, NumericalError, RegimeError
from .queueing import MarketParams
from .sensitivity import PriceModel, Tabulated, model_from_config, validate_assumptions
from .wardrop import QosMetric

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERICAL = 0, 2, 3, 4
COMMANDS = ("we", "sweep-rho", "br", "simulate", "equilibria", "compare", "validate-model")
SWEEP_VARIABLES = ("e", "beta", "alpha", "rho")

# sweep-rho falls back to these when the scenario leaves them out
SWEEP_RHO_MARKET = {"Lambda": 1.0, "e": 0.5}
SWEEP_RHO_MODEL = {"family": "quadratic", "a": 0.1, "phi_h": 9.0}
SWEEP_RHO_RANGE = {"variable": "rho", "start": 0.02, "stop": 1.2, "steps": 50}


# ------------------------------------------------------------------ config


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("sweep bounds must be finite")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError("sweep steps must be a positive integer")
        lo = min(self.start, self.stop)
        hi = max(self.start, self.stop)
        if self.variable in ("e", "rho") and lo <= 0:
            raise ConfigError(f"{self.variable} sweep must stay positive")
        if self.variable == "beta" and lo < 0:
            raise ConfigError("beta sweep must stay non-negative")
        if self.variable == "alpha" and (lo < 0 or hi >= 1):
            raise ConfigError("alpha sweep must stay inside [0, 1)")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.steps))

    def to_dict(self):
        return {"variable": self.variable, "start": self.start, "stop": self.stop, "steps": int(self.steps)}


@dataclass(frozen=True)
class ScenarioConfig:
    market: MarketParams
    model: PriceModel
    metric: QosMetric = QosMetric.BLOCKING
    sweep: SweepSpec | None = None
    options: dict = field(default_factory=dict)
    output: str | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        out = {
            "market": self.market.to_config(),
            "model": self.model.to_config(),
            "metric": self.metric.value,
            "seed": self.seed,
        }
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        if self.options:
            out["options"] = _plain(self.options)
        if self.output is not None:
            out["output"] = self.output
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


_MARKET_KEYS = {"Lambda", "eta", "e", "rho", "p", "nu", "beta", "alpha", "N_bar"}
_TOP_KEYS = {"market", "model", "metric", "sweep", "options", "output", "seed"}


def _market_from(frag: dict) -> MarketParams:
    if not isinstance(frag, dict):
        raise ConfigError("market must be a mapping")
    unknown = set(frag) - _MARKET_KEYS
    if unknown:
        raise ConfigError(f"unknown market keys: {sorted(unknown)}")
    given = [k for k in ("eta", "e", "rho") if k in frag]
    if len(given) != 1:
        raise ConfigError("market needs exactly one of eta, e or rho")
    if "Lambda" not in frag:
        raise ConfigError("market lacks Lambda")
    try:
        nums = {k: float(v) for k, v in frag.items() if k != "N_bar"}
        base = MarketParams(
            Lambda=nums["Lambda"],
            eta=1.0,
            p=nums.get("p", 0.5),
            nu=nums.get("nu", 1.0),
            beta=nums.get("beta", 0.0),
            alpha=nums.get("alpha", 0.0),
            N_bar=frag.get("N_bar", 50),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad market value: {exc}") from None
    key = given[0]
    if key == "rho" and base.Lambda <= 0:
        raise ConfigError("rho needs a positive Lambda")
    if nums[key] <= 0:
        raise ConfigError(f"{key} must be positive")
    return base.with_(**{key: nums[key]})


def _model_from(frag, base_dir: Path | None) -> PriceModel:
    if isinstance(frag, dict) and str(frag.get("family", "")).lower() == "tabulated" and "file" in frag:
        path = Path(frag["file"])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"tabulated curve file not found: {path}")
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        return Tabulated(phi=tuple(data[:, 0]), values=tuple(data[:, 1]))
    return model_from_config(frag)


def config_from_dict(raw: dict, base_dir: Path | None = None, defaults: dict | None = None) -> ScenarioConfig:
    """Validate a parsed scenario mapping. ``defaults`` fills missing top-level sections."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a mapping at the top level")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    merged = dict(defaults or {})
    merged.update(raw)
    if "market" not in merged:
        raise ConfigError("scenario lacks a market section")
    if "model" not in merged:
        raise ConfigError("scenario lacks a model section")
    market = _market_from(merged["market"])
    model = _model_from(merged["model"], base_dir)
    try:
        metric = QosMetric.parse(merged.get("metric", "blocking"))
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    sweep = None
    if merged.get("sweep") is not None:
        frag = merged["sweep"]
        if not isinstance(frag, dict):
            raise ConfigError("sweep must be a mapping")
        try:
            sweep = SweepSpec(str(frag["variable"]), float(frag["start"]), float(frag["stop"]), int(frag["steps"]))
        except KeyError as exc:
            raise ConfigError(f"sweep lacks {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad sweep value: {exc}") from None
    options = merged.get("options") or {}
    if not isinstance(options, dict):
        raise ConfigError("options must be a mapping")
    output = merged.get("output")
    try:
        seed = int(merged.get("seed", 0))
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer") from None
    return ScenarioConfig(market, model, metric, sweep, _plain(options), None if output is None else str(output), seed)


def load_config(path, defaults: dict | None = None) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())  # JSON is a subset of YAML
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return config_from_dict(raw, path.parent, defaults)


# ------------------------------------------------------------------ output


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def render(table: Table, fmt: str, cfg: ScenarioConfig) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    doc = {
        "config": cfg.to_dict(),
        "columns": table.columns,
        "rows": [dict(zip(table.columns, map(_json_value, row))) for row in table.rows],
    }
    doc.update(_json_value(table.meta))
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _json_value(v):
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# ------------------------------------------------------------------ commands


def _threads(args) -> int:
    raw = args.threads if args.threads is not None else os.environ.get("RIDEHAIL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"thread count must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _price_pairs(cfg):
    pairs = cfg.options.get("prices")
    if pairs is None:
        raise ConfigError("we needs options.prices: a pair [phi1, phi2] or a list of pairs")
    if pairs and not isinstance(pairs[0], (list, tuple)):
        pairs = [pairs]
    out = []
    for pair in pairs:
        if len(pair) != 2:
            raise ConfigError(f"price pair must have two entries, got {pair!r}")
        out.append((float(pair[0]), float(pair[1])))
    return out


def cmd_we(cfg: ScenarioConfig, args) -> Table:
    rows = []
    for phi1, phi2 in _price_pairs(cfg):
        if cfg.market.beta > 0:
            split = wardrop.solve_we(cfg.market, cfg.model, cfg.metric, phi1, phi2)
        else:
            split = wardrop.we_idp(cfg.market, cfg.model, cfg.metric, phi1, phi2)
        m1, m2 = wardrop.payoffs_at_we(cfg.market, cfg.model, cfg.metric, phi1, phi2)
        rows.append([phi1, phi2, split.lambda1, split.lambda2, split.gap, m1, m2])
    return Table(["phi1", "phi2", "lambda1", "lambda2", "gap", "M1", "M2"], rows)


def _sweep_rho_row(cfg, rho):
    params = cfg.market.with_(rho=float(rho), beta=0.0)
    table = equilibria.compare_regimes(params, cfg.model)
    mono, u, b = table.row("Monopoly"), table.row("Duopoly-U"), table.row("Duopoly-B")
    lo, hi = b.support if b.support else (math.nan, math.nan)
    b_price = math.nan if b.support else b.price
    regime = equilibria.classify_regime(params, cfg.model).value
    return [float(rho), mono.price, mono.payoff, u.price, u.payoff, b_price, lo, hi, b.payoff, regime,
            table.all_dominance]


def cmd_sweep_rho(cfg: ScenarioConfig, args) -> Table:
    sweep = cfg.sweep or SweepSpec(**SWEEP_RHO_RANGE)
    if sweep.variable != "rho":
        raise ConfigError("sweep-rho needs sweep.variable = rho")
    values = sweep.values()
    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        rows = list(pool.map(lambda r: _sweep_rho_row(cfg, r), values))
    cols = ["rho", "monopoly_price", "monopoly_payoff", "duopoly_u_price", "duopoly_u_payoff",
            "duopoly_b_price", "duopoly_b_phi_L", "duopoly_b_phi_R", "duopoly_b_payoff", "duopoly_b_regime",
            "dominance"]
    return Table(cols, rows)


def cmd_br(cfg: ScenarioConfig, args) -> Table:
    o = cfg.options
    init = tuple(float(v) for v in o.get("init", (cfg.model.phi_h * 0.9, cfg.model.phi_h * 0.9)))
    if len(init) != 2:
        raise ConfigError("options.init must hold two prices")
    iters = int(o.get("iters", 40))
    traj = dynamics.alternating_br(cfg.market, cfg.model, cfg.metric, init, iters, grid_n=int(o.get("grid_n", 2000)))
    burn = int(o.get("burn_in", iters // 2))
    tol = float(o.get("tol", 1e-3))
    cls = dynamics.classify_trajectory(traj, burn, tol)
    meta = {"classification": asdict(cls)}
    return Table(["iter", "player", "price", "payoff"], [list(r) for r in traj.rows()], meta)


def _flatten(prefix, d, rows):
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            _flatten(name + ".", v, rows)
        elif isinstance(v, list):
            continue  # histograms stay in the JSON form
        else:
            rows.append([name, v])


def cmd_simulate(cfg: ScenarioConfig, args) -> Table:
    o = cfg.options
    seed = args.seed if args.seed is not None else cfg.seed
    horizon = int(float(o.get("horizon", 100_000)))
    if "phi1" in o or "phi2" in o:
        res = simulate.simulate_duopoly(cfg.market, cfg.model, float(o["phi1"]), float(o["phi2"]), cfg.metric,
                                        horizon, seed)
        data = res.to_dict()
    else:
        if "lam" not in o or "phi" not in o:
            raise ConfigError("simulate needs options.lam and options.phi, or options.phi1 and options.phi2")
        est = simulate.simulate_platform(cfg.market, cfg.model, float(o["lam"]), float(o["phi"]), horizon, seed)
        data = est.to_dict()
        data["analytic"] = simulate.analytic_targets(cfg.market, cfg.model, float(o["lam"]), float(o["phi"]))
    rows = []
    _flatten("", data, rows)
    return Table(["quantity", "value"], rows, {"estimates": data, "seed": seed})


def cmd_equilibria(cfg: ScenarioConfig, args) -> Table:
    params = cfg.market.with_(beta=0.0)
    eps = float(cfg.options.get("eps", 1e-2))
    mono_price, mono_pay = equilibria.monopoly_optimal(params, cfg.model)
    u = equilibria.duopoly_u_ne(params, cfg.model)
    b = equilibria.duopoly_b_equilibrium(params, cfg.model, eps=eps)
    rows = [["monopoly", "price", mono_price, mono_pay], ["duopoly-U", u.kind, u.price, u.payoff]]
    meta = {"regime": equilibria.classify_regime(params, cfg.model).value}
    if isinstance(b, equilibria.MixedNE):
        rows.append(["duopoly-B", "MixedNE", b.support[0], b.mean_payoff])
        rows.append(["duopoly-B", "MixedNE-right", b.support[1], b.mean_payoff])
        report = equilibria.verify_ec(params, cfg.model, b.support)
        sec = equilibria.security_value(params, cfg.model)
        meta["equilibrium_cycle"] = {
            "interval": list(b.support),
            "passed": report.passed,
            "stability": report.stability.passed,
            "cyclicity": report.cyclicity.passed,
            "minimality": report.minimality.passed,
            "subintervals_refuted": report.refuted,
            "subintervals_tested": report.tested,
        }
        meta["security"] = {"value": sec.value, "strategy": sec.strategy, "grid_value": sec.grid_value}
    elif isinstance(b, equilibria.EpsNE):
        rows.append(["duopoly-B", "EpsNE", b.price, math.nan])
        meta["eps"] = b.eps
    else:
        rows.append(["duopoly-B", b.kind, b.price, b.payoff])
    return Table(["game", "kind", "price", "payoff"], rows, meta)


def cmd_compare(cfg: ScenarioConfig, args) -> Table:
    t = equilibria.compare_regimes(cfg.market.with_(beta=0.0), cfg.model)
    rows = []
    for r in t.rows:
        lo, hi = r.support if r.support else (math.nan, math.nan)
        rows.append([r.regime, r.price, r.payoff, lo, hi])
    meta = {
        "rho": t.rho,
        "b_price_le_monopoly": t.b_price_le_monopoly,
        "monopoly_price_le_u": t.monopoly_price_le_u,
        "duopoly_payoff_le_monopoly": t.duopoly_payoff_le_monopoly,
        "all_dominance": t.all_dominance,
    }
    return Table(["regime", "price", "payoff", "support_lo", "support_hi"], rows, meta)


def cmd_validate_model(cfg: ScenarioConfig, args) -> Table:
    report = validate_assumptions(cfg.model, int(cfg.options.get("grid_points", 1000)))
    rows = [[c.name, c.passed, c.first_violation] for c in report.checks]
    return Table(["check", "passed", "first_violation"], rows, {"ok": report.ok})


_HANDLERS = {
    "we": cmd_we,
    "sweep-rho": cmd_sweep_rho,
    "br": cmd_br,
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "compare": cmd_compare,
    "validate-model": cmd_validate_model,
}
_DEFAULT_FORMAT = {"simulate": "json", "equilibria": "json"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ridehail", description="Ride-hailing platform competition toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "sweep-rho", help="scenario file (YAML or JSON)")
        p.add_argument("--out", help="output file; '-' for stdout")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def _destination(args, cfg: ScenarioConfig, fmt: str):
    if args.out:
        return None if args.out == "-" else Path(args.out)
    if cfg.output:
        return Path(cfg.output)
    out_dir = os.environ.get("RIDEHAIL_OUT_DIR")
    if out_dir:
        return Path(out_dir) / f"{args.command}.{fmt}"
    return None


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep-rho":
            defaults = {"market": SWEEP_RHO_MARKET, "model": SWEEP_RHO_MODEL}
            cfg = load_config(args.config, defaults) if args.config else config_from_dict({}, None, defaults)
        else:
            cfg = load_config(args.config)
        fmt = args.format or _DEFAULT_FORMAT.get(args.command, "csv")
        table = _HANDLERS[args.command](cfg, args)
        text = render(table, fmt, cfg)
        dest = _destination(args, cfg, fmt)
        if dest is None:
            sys.stdout.write(text)
        else:
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(text)
        if args.command == "validate-model" and not table.meta["ok"]:
            print("model violates the curve assumptions", file=sys.stderr)
            return EXIT_REGIME
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeError, DomainError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
