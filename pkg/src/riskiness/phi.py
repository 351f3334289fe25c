"""Evaluation of phi(lambda) = E log(1 + lambda X) and its derivative.

phi is defined on [0, 1/L) for discrete gambles. For density gambles it also
has a (possibly negative-infinite) value at the boundary 1/L, where the
integrand carries an integrable log singularity at x = -L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.laguerre import laggauss
from scipy import special

from .errors import OutOfDomain
from .gamble import DensityGamble, DiscreteGamble, Gamble, ShiftedLognormal, max_loss
from .quadrature import integrate

PHI_TOL = 1e-12
BOUNDARY_SPLIT = 1e-6
DIVERGENCE_LEVEL = -1e3
_EPS = np.finfo(float).eps
_LAGUERRE = {n: laggauss(n) for n in (32, 64)}


@dataclass(frozen=True)
class PhiEvaluation:
    lam: float
    value: float
    abs_error_bound: float


def boundary_lambda(g: Gamble) -> float:
    """lambda* = 1/L."""
    return 1.0 / max_loss(g)


def _check_domain(g: Gamble, lam: float) -> float:
    lam = float(lam)
    lam_star = boundary_lambda(g)
    if not lam >= 0.0 or lam > lam_star:
        raise OutOfDomain(f"lambda={lam!r} outside [0, {lam_star!r}]")
    if lam == lam_star and isinstance(g, DiscreteGamble):
        raise OutOfDomain("discrete gambles are not evaluated at lambda* = 1/L")
    return lam


def _discrete_phi(g: DiscreteGamble, lam: float) -> PhiEvaluation:
    y = lam * g.values
    terms = g.probs * np.log1p(y)
    value = math.fsum(terms)
    # rounding of lambda*x propagates through log1p with condition |y/(1+y)|
    bound = 4.0 * _EPS * float(np.sum(g.probs * (np.abs(np.log1p(y)) + np.abs(y / (1.0 + y)))))
    return PhiEvaluation(lam, value, bound)


def _inner_boundary_piece(g: DensityGamble, delta: float) -> tuple[float, float]:
    """Integral of log((x+L)/L) f(x) over [-L, -L+delta].

    Written as log(delta/L) P(X < -L+delta) + delta * int_0^1 log(s) f(-L+delta s) ds;
    the second term becomes a Gauss-Laguerre sum after s = exp(-t).
    """
    L = -g.lower
    head = math.log(delta / L) * float(g.cdf(g.lower + delta))
    sums = []
    for n in (32, 64):
        t, w = _LAGUERRE[n]
        f = g.pdf(g.lower + delta * np.exp(-t))
        sums.append(-delta * float(np.sum(w * t * f)))
    return head + sums[1], abs(sums[1] - sums[0])


def _compact_phi(g: DensityGamble, lam: float, tol: float) -> PhiEvaluation:
    lam_star = boundary_lambda(g)
    bps = g.breakpoints or None
    if lam < lam_star:
        value, err = integrate(
            lambda x: np.log1p(lam * x) * g.pdf(x), g.lower, g.upper, tol=tol, breakpoints=bps,
        )
        return PhiEvaluation(lam, value, err)

    L = -g.lower
    delta = BOUNDARY_SPLIT * (g.upper - g.lower)
    split = g.lower + delta
    outer, outer_err = integrate(
        lambda x: np.log1p(x / L) * g.pdf(x), split, g.upper, tol=tol,
        breakpoints=[b for b in g.breakpoints if b > split] or None,
    )
    inner, inner_err = _inner_boundary_piece(g, delta)
    value = outer + inner
    err = outer_err + inner_err
    if not math.isfinite(inner) or (value < DIVERGENCE_LEVEL and not math.isfinite(inner_err)):
        return PhiEvaluation(lam, -math.inf, 0.0)
    return PhiEvaluation(lam, value, err)


def _lognormal_terms(fam: ShiftedLognormal, lam: float):
    lam_star = -1.0 / fam.theta
    c = 0.0 if lam == lam_star else 1.0 + lam * fam.theta
    log_lam = math.log(lam)

    def log_term(y):
        if c > 0.5:
            return np.log1p(lam * fam.theta + lam * np.exp(y))
        log_c = math.log(c) if c > 0 else -math.inf
        return np.logaddexp(log_c, log_lam + y)

    return c, log_lam, log_term


def _lognormal_phi(fam: ShiftedLognormal, lam: float, tol: float) -> PhiEvaluation:
    c, log_lam, log_term = _lognormal_terms(fam, lam)
    lo, hi = fam.log_space_range(growth=1.0)
    value, err = integrate(lambda y: log_term(y) * fam.normal_pdf(y), lo, hi, tol=tol, initial=16)

    # upper tail: log(c + lam e^y) <= lam e^y there
    z_hi = (hi - fam.mu - fam.sigma**2) / fam.sigma
    upper_tail = lam * math.exp(fam.mu + 0.5 * fam.sigma**2) * float(special.ndtr(-z_hi))
    # lower tail: |log(c + lam e^y)| <= |log(c + lam e^lo)| + |log lam| + |y|
    z_lo = (lo - fam.mu) / fam.sigma
    mass = float(special.ndtr(z_lo))
    abs_y = abs(fam.mu) * mass + fam.sigma * math.exp(-0.5 * z_lo**2) / math.sqrt(2 * math.pi)
    lower_tail = (abs(float(log_term(np.array([lo]))[0])) + abs(log_lam)) * mass + abs_y
    return PhiEvaluation(lam, value, err + upper_tail + lower_tail)


def phi(g: Gamble, lam: float, tol: float = PHI_TOL) -> PhiEvaluation:
    """E log(1 + lam X) with an absolute error bound.

    Discrete gambles accept 0 <= lam < 1/L; density gambles also lam = 1/L.
    """
    lam = _check_domain(g, lam)
    if lam == 0.0:
        return PhiEvaluation(0.0, 0.0, 0.0)
    if isinstance(g, DiscreteGamble):
        return _discrete_phi(g, lam)
    if isinstance(g.family, ShiftedLognormal):
        return _lognormal_phi(g.family, lam, tol)
    return _compact_phi(g, lam, tol)


def phi_derivative(g: Gamble, lam: float, tol: float = PHI_TOL) -> float:
    """E[X / (1 + lam X)] for 0 <= lam < 1/L."""
    lam = _check_domain(g, lam)
    if lam >= boundary_lambda(g):
        raise OutOfDomain("the derivative is not defined at lambda* = 1/L")
    if isinstance(g, DiscreteGamble):
        return math.fsum(g.probs * g.values / (1.0 + lam * g.values))
    fam = g.family
    if isinstance(fam, ShiftedLognormal):
        th = fam.theta
        lo, hi = fam.log_space_range(growth=1.0)
        value, _ = integrate(
            lambda y: (th + np.exp(y)) / (1.0 + lam * th + lam * np.exp(y)) * fam.normal_pdf(y),
            lo, hi, tol=tol, initial=16,
        )
        return value
    value, _ = integrate(
        lambda x: x / (1.0 + lam * x) * g.pdf(x), g.lower, g.upper, tol=tol,
        breakpoints=g.breakpoints or None,
    )
    return value


def phi_curve(g: Gamble, lams) -> np.ndarray:
    """phi on a grid of lambdas (for plotting); points at 1/L of a discrete gamble map to -inf."""
    out = []
    lam_star = boundary_lambda(g)
    for lam in lams:
        if isinstance(g, DiscreteGamble) and lam >= lam_star:
            out.append(-math.inf)
        else:
            out.append(phi(g, lam).value)
    return np.array(out)
