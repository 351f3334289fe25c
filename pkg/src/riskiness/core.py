"""Extended Foster-Hart riskiness.

For a gamble with maximal loss L the riskiness is the unique rho > L solving
E log(1 + X/rho) = 0 when phi(1/L) < 0, and L itself when phi(1/L) >= 0.
Discrete gambles always fall in the first regime because the atom at -L
drives phi to -inf at 1/L.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BoundarySignAmbiguous, UnboundedGambleWarning
from .gamble import DensityGamble, DiscreteGamble, Gamble, ShiftedLognormal, max_loss, validate
from .phi import PHI_TOL, boundary_lambda, phi, phi_derivative

ROOT_TOL = 1e-10
BRACKET_RTOL = 1e-14
TAIL_QUANTILE = 1e-12


class Regime(str, enum.Enum):
    EQUATION_SOLVED = "equation-solved"
    MAXIMAL_LOSS = "maximal-loss"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RiskinessResult:
    rho: float
    lam: float
    regime: Regime
    residual: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "lambda": self.lam,
            "regime": self.regime.value,
            "residual": self.residual,
        }


def _safeguarded_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    start: float,
    lam_star: float,
    tol: float,
) -> tuple[float, float]:
    """Root of a concave ``f`` with f(lo) > 0 > f(hi).

    Newton steps that leave the bracket are replaced by bisection. Once
    |f| <= tol, iteration continues until the Newton correction is at
    rounding level, which costs one or two extra steps.
    """
    x = start
    best = (math.inf, x)
    for _ in range(300):
        fx = f(x)
        if abs(fx) < best[0]:
            best = (abs(fx), x)
        if fx == 0.0:
            return x, 0.0
        if fx > 0:
            lo = x
        else:
            hi = x
        dfx = df(x)
        step = fx / dfx if dfx != 0.0 and math.isfinite(dfx) else math.nan
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        small_step = abs(x_new - x) <= 1e-13 * abs(x)
        narrow = hi - lo <= BRACKET_RTOL * lam_star
        if abs(fx) <= tol and (small_step or narrow):
            fn = f(x_new)
            return (x_new, abs(fn)) if abs(fn) <= abs(fx) else (x, abs(fx))
        if narrow:
            return best[1], best[0]
        x = x_new
    return best[1], best[0]


def _initial_lo(f: Callable[[float], float], lam_star: float) -> float:
    lo = min(1e-12, 0.5 * lam_star)
    while f(lo) <= 0.0:
        lo *= 1e-3
        if lo < 1e-300:
            raise ArithmeticError("no positive phi near 0; mean too small to bracket")
    return lo


def _gap_root(g: DiscreteGamble) -> tuple[float, float, float]:
    """Root when it lies within rounding of 1/L.

    Parametrize lambda = (1 - e^t)/L: the atom at -L contributes p0 * t exactly,
    so t is found even when e^t underflows. Returns (lam, rho, residual).
    """
    L = max_loss(g)
    at_min = g.values == -L
    p0 = float(g.probs[at_min].sum())
    y = g.values[~at_min] / L
    p = g.probs[~at_min]

    def psi(t):
        return p0 * t + math.fsum(p * np.log1p(y - y * math.exp(t)))

    # psi < 0 as t -> -inf (lambda -> 1/L) and > 0 as t -> 0; rounding of
    # lambda * L can leave the root on either side of log(2^-52)
    t_lo = t_hi = math.log(2.0**-52)
    while psi(t_lo) > 0:
        t_lo *= 2.0
    while psi(t_hi) <= 0:
        t_hi *= 0.5
    t = brentq(psi, t_lo, t_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    gap = math.exp(t)
    return (1.0 - gap) / L, L / (1.0 - gap), abs(psi(t))


def static_riskiness(g: DiscreteGamble, tol: float = ROOT_TOL) -> RiskinessResult:
    """Foster-Hart riskiness 1/lambda with lambda the positive root of phi."""
    validate(g)
    lam_star = boundary_lambda(g)

    def f(lam: float) -> float:
        return phi(g, lam).value

    def df(lam: float) -> float:
        return phi_derivative(g, lam)

    lo = _initial_lo(f, lam_star)
    hi = None
    for k in range(1, 53):
        cand = lam_star * (1.0 - 2.0**-k)
        if f(cand) < 0.0:
            hi = cand
            break
        lo = max(lo, cand)
    if hi is None:
        lam, rho, res = _gap_root(g)
        return RiskinessResult(rho, lam, Regime.EQUATION_SOLVED, res)
    lam, res = _safeguarded_newton(f, df, lo, hi, hi, lam_star, tol)
    return RiskinessResult(1.0 / lam, lam, Regime.EQUATION_SOLVED, res)


def extended_riskiness(
    g: DensityGamble,
    tol: float = ROOT_TOL,
    tie: str = "raise",
    phi_tol: float = PHI_TOL,
) -> RiskinessResult:
    """Riskiness of a density gamble via the sign of phi at 1/L.

    ``tie`` decides what happens when |phi(1/L)| is within its error bound:
    ``"raise"`` (BoundarySignAmbiguous) or ``"maximal-loss"`` (treat as
    phi(1/L) = 0, which the weak inequality assigns to the maximal loss).
    """
    if tie not in ("raise", "maximal-loss"):
        raise ValueError(f"tie must be 'raise' or 'maximal-loss', not {tie!r}")
    validate(g)
    L = max_loss(g)
    lam_star = boundary_lambda(g)
    edge = phi(g, lam_star, tol=phi_tol)
    if edge.value > edge.abs_error_bound:
        return RiskinessResult(L, lam_star, Regime.MAXIMAL_LOSS, None)
    if edge.value >= -edge.abs_error_bound:
        if tie == "raise":
            raise BoundarySignAmbiguous(edge.value, edge.abs_error_bound)
        return RiskinessResult(L, lam_star, Regime.MAXIMAL_LOSS, None)

    def f(lam: float) -> float:
        return edge.value if lam == lam_star else phi(g, lam, tol=phi_tol).value

    def df(lam: float) -> float:
        return phi_derivative(g, lam, tol=phi_tol)

    lo = _initial_lo(f, lam_star)
    lam, res = _safeguarded_newton(f, df, lo, lam_star, 0.5 * (lo + lam_star), lam_star, tol)
    return RiskinessResult(1.0 / lam, lam, Regime.EQUATION_SOLVED, res)


def riskiness(g: Gamble, tol: float = ROOT_TOL, tie: str = "raise") -> RiskinessResult:
    if isinstance(g, DiscreteGamble):
        return static_riskiness(g, tol=tol)
    return extended_riskiness(g, tol=tol, tie=tie)


def acceptance_wealth_bound(g: Gamble) -> float:
    """Wealth W0 = max(2 E[X^2]/E[X], 2 sup|X|) at which phi(1/W0) >= 0.

    Both conditions of the bound hold there: W >= 2E[X^2]/E[X] and |X/W| <= 1/2,
    so log(1 + X/W) >= X/W - 2(X/W)^2 has nonnegative mean. Half-line
    gambles are certified only up to their 1 - 1e-12 quantile, with an
    UnboundedGambleWarning.
    """
    stats = validate(g)
    moment_bound = 2.0 * stats.second_moment / stats.mean
    upper = stats.max_gain
    if not math.isfinite(upper):
        fam = g.family
        assert isinstance(fam, ShiftedLognormal)
        upper = float(fam.ppf(1.0 - TAIL_QUANTILE))
        warnings.warn(
            "half-line gamble: |X/W| <= 1/2 checked only below the 1-1e-12 quantile",
            UnboundedGambleWarning,
            stacklevel=2,
        )
    return max(moment_bound, 2.0 * max(stats.max_loss, abs(upper)))


def accept(g: Gamble, wealth: float) -> bool:
    """Accept the gamble at ``wealth`` iff E log(1 + X/wealth) >= 0.

    The comparison allows the evaluation's own error bound, so a wealth
    equal to the riskiness is accepted.
    """
    if not wealth > 0:
        raise ValueError("wealth must be > 0")
    L = max_loss(g)
    if wealth < L or (wealth == L and isinstance(g, DiscreteGamble)):
        return False
    lam = boundary_lambda(g) if wealth == L else 1.0 / wealth
    ev = phi(g, lam)
    return ev.value >= -ev.abs_error_bound


def accept_by_threshold(result: RiskinessResult, wealth: float, rtol: float = 1e-9) -> bool:
    """Same decision through a precomputed riskiness: wealth >= rho."""
    return wealth >= result.rho * (1.0 - rtol)
