"""Price-sensitivity curves: the probability that a passenger accepts a quoted price.

Every curve ``f`` lives on ``[0, phi_h]`` and is expected to satisfy

* ``f(0) = 1`` and ``0 < f <= 1``,
* strict decrease and strict concavity.

These are checked numerically by :func:`validate_assumptions` rather than
enforced at construction, so that user-supplied tabulated curves can be
inspected before use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, DomainError

_SLACK = 1e-12


class PriceModel:
    """Base class. Subclasses supply ``_f``, ``_fprime``, ``_phi_fprime`` and ``_inverse``."""

    family: str = ""
    phi_h: float

    def _f(self, phi):
        raise NotImplementedError

    def _fprime(self, phi):
        raise NotImplementedError

    def _phi_fprime(self, phi):
        return phi * self._fprime(phi)

    def _inverse(self, x):
        """Root of ``f(phi) = x`` for scalar ``x`` in ``[f(phi_h), 1]``."""
        if x >= 1.0:
            return 0.0
        return optimize.brentq(lambda t: self._f(t) - x, 0.0, self.phi_h, xtol=1e-15, rtol=4e-16)

    def _check_domain(self, phi):
        arr = np.asarray(phi, dtype=float)
        slack = _SLACK * max(1.0, self.phi_h)
        if np.any(~np.isfinite(arr)) or np.any(arr < -slack) or np.any(arr > self.phi_h + slack):
            raise DomainError(f"price outside [0, {self.phi_h}]: {phi!r}")
        return np.clip(arr, 0.0, self.phi_h)

    def to_config(self) -> dict:
        raise NotImplementedError


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class Quadratic(PriceModel):
    """``f(phi) = 1 - (a phi)^2``."""

    a: float
    phi_h: float
    family: str = field(default="quadratic", init=False)

    def __post_init__(self):
        _check_positive("a", self.a)
        _check_positive("phi_h", self.phi_h)

    def _f(self, phi):
        return 1.0 - (self.a * phi) ** 2

    def _fprime(self, phi):
        return -2.0 * self.a**2 * phi

    def _inverse(self, x):
        return math.sqrt(max(1.0 - x, 0.0)) / self.a

    def to_config(self):
        return {"family": "quadratic", "a": self.a, "phi_h": self.phi_h}


@dataclass(frozen=True)
class Linear(PriceModel):
    """``f(phi) = 1 - slope * phi``. Concave but not strictly so."""

    slope: float
    phi_h: float
    family: str = field(default="linear", init=False)

    def __post_init__(self):
        _check_positive("slope", self.slope)
        _check_positive("phi_h", self.phi_h)

    def _f(self, phi):
        return 1.0 - self.slope * phi

    def _fprime(self, phi):
        return np.full_like(np.asarray(phi, dtype=float), -self.slope)

    def _inverse(self, x):
        return (1.0 - x) / self.slope

    def to_config(self):
        return {"family": "linear", "slope": self.slope, "phi_h": self.phi_h}


@dataclass(frozen=True)
class Sqrt(PriceModel):
    """``f(phi) = 1 - sqrt(phi / scale)``.

    The slope is infinite at zero; ``phi * f'(phi) = -sqrt(phi/scale)/2`` stays finite.
    """

    scale: float
    phi_h: float
    family: str = field(default="sqrt", init=False)

    def __post_init__(self):
        _check_positive("scale", self.scale)
        _check_positive("phi_h", self.phi_h)

    def _f(self, phi):
        return 1.0 - np.sqrt(phi / self.scale)

    def _fprime(self, phi):
        phi = np.asarray(phi, dtype=float)
        with np.errstate(divide="ignore"):
            return -0.5 / np.sqrt(phi * self.scale)

    def _phi_fprime(self, phi):
        return -0.5 * np.sqrt(phi / self.scale)

    def _inverse(self, x):
        return self.scale * max(1.0 - x, 0.0) ** 2

    def to_config(self):
        return {"family": "sqrt", "scale": self.scale, "phi_h": self.phi_h}


@dataclass(frozen=True)
class Tabulated(PriceModel):
    """Monotone cubic (PCHIP) interpolation through ``(phi_k, f_k)``.

    The grid must start at 0 and be strictly increasing; its last node is ``phi_h``.
    """

    phi: tuple
    values: tuple
    family: str = field(default="tabulated", init=False)
    phi_h: float = field(init=False)
    _interp: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.phi, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 3:
            raise ConfigError("tabulated curve needs matching 1-D grids with at least 3 nodes")
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise ConfigError("tabulated grid must start at 0 and increase strictly")
        if not np.all(np.isfinite(y)):
            raise ConfigError("tabulated values must be finite")
        object.__setattr__(self, "phi", tuple(float(v) for v in x))
        object.__setattr__(self, "values", tuple(float(v) for v in y))
        object.__setattr__(self, "phi_h", float(x[-1]))
        object.__setattr__(self, "_interp", PchipInterpolator(x, y, extrapolate=False))

    def _f(self, phi):
        return self._interp(phi)

    def _fprime(self, phi):
        phi = np.asarray(phi, dtype=float)
        h = 1e-6 * self.phi_h
        lo = np.clip(phi - h, 0.0, self.phi_h)
        hi = np.clip(phi + h, 0.0, self.phi_h)
        return (self._interp(hi) - self._interp(lo)) / (hi - lo)

    def _inverse(self, x):
        if x >= self.values[0]:
            return 0.0
        return super()._inverse(x)

    def to_config(self):
        return {"family": "tabulated", "phi": list(self.phi), "f": list(self.values)}


def _scalar_or_array(result, phi):
    if np.ndim(phi) == 0:
        return float(result)
    return np.asarray(result, dtype=float)


def eval_f(model: PriceModel, phi):
    """Acceptance probability ``f(phi)``; accepts scalars or arrays."""
    arr = model._check_domain(phi)
    return _scalar_or_array(model._f(arr), phi)


def eval_f_prime(model: PriceModel, phi):
    """Derivative ``f'(phi)`` (one-sided at the endpoints)."""
    arr = model._check_domain(phi)
    return _scalar_or_array(model._fprime(arr), phi)


def phi_f_prime(model: PriceModel, phi):
    """``phi * f'(phi)``, finite even where ``f'`` is not."""
    arr = model._check_domain(phi)
    return _scalar_or_array(model._phi_fprime(arr), phi)


def eval_f_inverse(model: PriceModel, x: float) -> float:
    """Extended inverse of ``f``.

    Returns ``phi_h`` when ``x < f(phi_h)``, the unique solution of ``f(phi) = x``
    when ``f(phi_h) <= x <= 1`` and ``0`` when ``x > 1``.
    """
    x = float(x)
    if x < 0 or not math.isfinite(x):
        raise DomainError(f"inverse argument must be finite and non-negative, got {x}")
    if x > 1.0:
        return 0.0
    if x < float(model._f(model.phi_h)):
        return float(model.phi_h)
    return float(min(max(model._inverse(x), 0.0), model.phi_h))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    first_violation: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _first(grid, mask):
    idx = np.flatnonzero(mask)
    return None if idx.size == 0 else float(grid[idx[0]])


def validate_assumptions(model: PriceModel, grid_points: int = 1000) -> ValidationReport:
    """Check positivity, normalisation, strict decrease and strict concavity on a uniform grid.

    Strictness means differences below ``-1e-12``. Each failing check records the
    first offending grid point.
    """
    if grid_points < 3:
        raise DomainError("grid_points must be at least 3")
    grid = np.linspace(0.0, model.phi_h, int(grid_points))
    f = np.asarray(model._f(grid), dtype=float)
    d1 = np.diff(f)
    d2 = np.diff(f, 2)
    pos_bad = ~((f > 0) & (f <= 1.0 + _SLACK))
    dec_bad = ~(d1 < -_SLACK)
    conc_bad = ~(d2 < -_SLACK)
    checks = (
        Check("positivity", not bool(pos_bad.any()), _first(grid, pos_bad)),
        Check("f(0)=1", bool(abs(f[0] - 1.0) <= _SLACK), None if abs(f[0] - 1.0) <= _SLACK else 0.0),
        Check("strictly decreasing", not bool(dec_bad.any()), _first(grid[1:], dec_bad)),
        Check("strictly concave", not bool(conc_bad.any()), _first(grid[1:-1], conc_bad)),
    )
    return ValidationReport(checks)


def model_from_config(cfg: dict) -> PriceModel:
    """Build a model from a fragment such as ``{"family": "quadratic", "a": 0.1, "phi_h": 9.0}``."""
    if not isinstance(cfg, dict):
        raise ConfigError("model fragment must be a mapping")
    family = str(cfg.get("family", "")).lower()
    try:
        if family == "quadratic":
            return Quadratic(a=float(cfg["a"]), phi_h=float(cfg["phi_h"]))
        if family == "linear":
            return Linear(slope=float(cfg["slope"]), phi_h=float(cfg["phi_h"]))
        if family == "sqrt":
            return Sqrt(scale=float(cfg["scale"]), phi_h=float(cfg["phi_h"]))
        if family == "tabulated":
            return Tabulated(phi=tuple(cfg["phi"]), values=tuple(cfg["f"]))
    except KeyError as exc:
        raise ConfigError(f"model fragment for {family!r} lacks key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad model fragment: {exc}") from None
    raise ConfigError(f"unknown model family {cfg.get('family')!r}")
