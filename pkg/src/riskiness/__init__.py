"""Extended Foster-Hart riskiness for discrete and continuous gambles."""

from .core import (
    Regime,
    RiskinessResult,
    accept,
    acceptance_wealth_bound,
    extended_riskiness,
    riskiness,
    static_riskiness,
)
from .errors import (
    BoundarySignAmbiguous,
    InsufficientEvents,
    NotAGamble,
    NotConditionalGamble,
    NotYetAGamble,
    OutOfDomain,
    ShapeMismatch,
    SpecInvalid,
    UnboundedGambleWarning,
)
from .gamble import (
    Beta,
    DensityGamble,
    DiscreteGamble,
    GambleStats,
    ShiftedLognormal,
    Tabulated,
    Uniform,
    gamble_from_dict,
    max_loss,
    validate,
)
from .phi import PhiEvaluation, phi, phi_derivative

__version__ = "0.1.0"

__all__ = [
    "Regime",
    "RiskinessResult",
    "accept",
    "acceptance_wealth_bound",
    "extended_riskiness",
    "riskiness",
    "static_riskiness",
    "BoundarySignAmbiguous",
    "InsufficientEvents",
    "NotAGamble",
    "NotConditionalGamble",
    "NotYetAGamble",
    "OutOfDomain",
    "ShapeMismatch",
    "SpecInvalid",
    "UnboundedGambleWarning",
    "Beta",
    "DensityGamble",
    "DiscreteGamble",
    "GambleStats",
    "ShiftedLognormal",
    "Tabulated",
    "Uniform",
    "gamble_from_dict",
    "max_loss",
    "validate",
    "PhiEvaluation",
    "phi",
    "phi_derivative",
]
