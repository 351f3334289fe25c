"""Exception hierarchy shared by the riskiness modules."""

from __future__ import annotations


class RiskinessError(Exception):
    """Base class for every error raised by this package."""


class NotAGamble(RiskinessError, ValueError):
    """The payoff violates a gamble precondition (mean > 0, loss mass > 0, ...)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class OutOfDomain(RiskinessError, ValueError):
    """A lambda outside the range where E log(1 + lambda X) is defined."""


class BoundarySignAmbiguous(RiskinessError):
    """|phi(1/L)| is below its own error bound, so the regime cannot be decided."""

    def __init__(self, value: float, error_bound: float):
        super().__init__(
            f"phi at the maximal-loss boundary is {value:.3e} with error bound "
            f"{error_bound:.3e}; tighten the tolerance or break the tie explicitly"
        )
        self.value = value
        self.error_bound = error_bound


class NotYetAGamble(RiskinessError):
    """A dyadic level whose induced discrete payoff still has mean <= 0."""

    def __init__(self, level: int, mean: float):
        super().__init__(f"level {level} discretization has mean {mean:.6g} <= 0")
        self.level = level
        self.mean = mean


class NotConditionalGamble(RiskinessError):
    """A tree node whose conditional payoff is not a gamble."""

    def __init__(self, node: str, reason: str):
        super().__init__(f"node {node!r}: {reason}")
        self.node = node
        self.reason = reason


class ShapeMismatch(RiskinessError, ValueError):
    """Two trees do not share the same filtration."""


class SpecInvalid(RiskinessError, ValueError):
    """A simulation or sweep specification is malformed."""


class InsufficientEvents(RiskinessError):
    """Too few acceptance events to run the submartingale check."""


class UnboundedGambleWarning(UserWarning):
    """The acceptance-wealth bound could only be certified on a truncated support."""
