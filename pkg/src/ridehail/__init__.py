"""Pricing games between ride-hailing platforms with impatient drivers and price-sensitive passengers."""

from .errors import (
    ConfigError,
    DomainError,
    MonotonicityError,
    NumericalError,
    RegimeError,
    RidehailError,
    TruncationError,
)
from .queueing import MarketParams
from .sensitivity import (
    Linear,
    PriceModel,
    Quadratic,
    Sqrt,
    Tabulated,
    eval_f,
    eval_f_inverse,
    eval_f_prime,
    model_from_config,
    validate_assumptions,
)
from .wardrop import QosMetric, WardropSplit, payoffs_at_we, solve_we, we_idp

__all__ = [
    "ConfigError",
    "DomainError",
    "Linear",
    "MarketParams",
    "MonotonicityError",
    "NumericalError",
    "PriceModel",
    "QosMetric",
    "Quadratic",
    "RegimeError",
    "RidehailError",
    "Sqrt",
    "Tabulated",
    "TruncationError",
    "WardropSplit",
    "eval_f",
    "eval_f_inverse",
    "eval_f_prime",
    "model_from_config",
    "payoffs_at_we",
    "solve_we",
    "validate_assumptions",
    "we_idp",
]
