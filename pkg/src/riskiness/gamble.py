"""Gambles: discrete payoffs and payoffs with a strictly positive density.

A gamble is a payoff ``X`` with ``E[X] > 0`` and ``P(X < 0) > 0``. Discrete
gambles are finite outcome lists; density gambles live on a compact interval
``[-L, M]`` or on a half-line ``[-L, inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np
from scipy import special, stats

from .errors import NotAGamble
from .quadrature import integrate

DISCRETE_SUM_TOL = 1e-12
DENSITY_MASS_TOL = 1e-9
MOMENT_TOL = 1e-10

__all__ = [
    "DiscreteGamble",
    "DensityGamble",
    "Uniform",
    "Beta",
    "ShiftedLognormal",
    "Tabulated",
    "GambleStats",
    "Gamble",
    "validate",
    "max_loss",
    "gamble_from_dict",
    "gamble_to_dict",
]


@dataclass(frozen=True, eq=False)
class DiscreteGamble:
    """Finite list of ``(value, probability)`` outcomes."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        probs = np.array(self.probs, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape:
            raise ValueError("values and probs must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(probs))):
            raise ValueError("outcomes must be finite")
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_outcomes(cls, outcomes) -> "DiscreteGamble":
        pairs = [(float(v), float(p)) for v, p in outcomes]
        if not pairs:
            raise ValueError("no outcomes")
        values, probs = zip(*pairs)
        return cls(np.array(values), np.array(probs))

    @property
    def outcomes(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def scaled(self, c: float) -> "DiscreteGamble":
        return DiscreteGamble(self.values * c, self.probs)

    def sample(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in (0, 1] to outcomes by cumulative-probability lookup."""
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side="left")
        return self.values[np.minimum(idx, len(cum) - 1)]

    def __repr__(self) -> str:
        return f"DiscreteGamble({self.outcomes!r})"


# ---------------------------------------------------------------------------
# density families


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("Uniform needs a < b")

    lower = property(lambda self: float(self.a))
    upper = property(lambda self: float(self.b))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def ppf(self, u):
        return self.a + (self.b - self.a) * np.asarray(u, dtype=float)

    def scaled(self, c: float) -> "Uniform":
        return Uniform(self.a * c, self.b * c)


@dataclass(frozen=True)
class Beta:
    """Beta(alpha, beta) law stretched onto [a, b]; mean (alpha*b + beta*a)/(alpha+beta)."""

    alpha: float
    beta: float
    a: float
    b: float

    def __post_init__(self):
        # bounded density only; the boundary split near -L relies on it
        if not (self.alpha >= 1 and self.beta >= 1):
            raise ValueError("Beta needs alpha >= 1 and beta >= 1")
        if not self.a < self.b:
            raise ValueError("Beta needs a < b")

    lower = property(lambda self: float(self.a))
    upper = property(lambda self: float(self.b))

    @property
    def _dist(self):
        return stats.beta(self.alpha, self.beta, loc=self.a, scale=self.b - self.a)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        width = self.b - self.a
        t = np.clip((x - self.a) / width, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logf = (
                special.xlogy(self.alpha - 1.0, t)
                + special.xlog1py(self.beta - 1.0, -t)
                - special.betaln(self.alpha, self.beta)
                - math.log(width)
            )
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, np.exp(logf), 0.0)

    def cdf(self, x):
        t = np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)
        return special.betainc(self.alpha, self.beta, t)

    def ppf(self, u):
        return self.a + (self.b - self.a) * special.betaincinv(self.alpha, self.beta, np.asarray(u, float))

    def scaled(self, c: float) -> "Beta":
        return Beta(self.alpha, self.beta, self.a * c, self.b * c)


@dataclass(frozen=True)
class ShiftedLognormal:
    """``theta + exp(N(mu, sigma^2))``: sigma is the std-dev of log(X - theta)."""

    mu: float
    sigma: float
    theta: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("ShiftedLognormal needs sigma > 0")

    lower = property(lambda self: float(self.theta))
    upper = property(lambda self: math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = x - self.theta
        with np.errstate(divide="ignore", invalid="ignore"):
            out = stats.lognorm.pdf(z, self.sigma, scale=math.exp(self.mu))
        return np.where(z > 0, out, 0.0)

    def cdf(self, x):
        z = np.asarray(x, dtype=float) - self.theta
        with np.errstate(divide="ignore"):
            logz = np.log(np.where(z > 0, z, 0.0))
        return special.ndtr((logz - self.mu) / self.sigma)

    def ppf(self, u):
        return self.theta + np.exp(self.mu + self.sigma * special.ndtri(np.asarray(u, float)))

    def quantile_log(self, q: float) -> float:
        """Point y such that P(log(X - theta) > y) = q."""
        return self.mu - self.sigma * float(special.ndtri(q))

    def log_space_range(self, growth: float = 0.0, width: float = 12.0) -> tuple[float, float]:
        """Window in y = log(X - theta) holding all but ~Phi(-width) mass of
        ``exp(growth * y) * normal_pdf(y)``."""
        return (self.mu - width * self.sigma, self.mu + growth * self.sigma**2 + width * self.sigma)

    def normal_pdf(self, y):
        return np.exp(-0.5 * ((y - self.mu) / self.sigma) ** 2) / (self.sigma * math.sqrt(2 * math.pi))

    def scaled(self, c: float) -> "ShiftedLognormal":
        return ShiftedLognormal(self.mu + math.log(c), self.sigma, self.theta * c)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear density through ``(x[i], density[i])``, renormalized to mass 1."""

    x: tuple[float, ...]
    density: tuple[float, ...]
    _raw_mass: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        d = tuple(float(v) for v in self.density)
        if len(x) < 2 or len(x) != len(d):
            raise ValueError("Tabulated needs >= 2 points and matching density values")
        if any(x1 <= x0 for x0, x1 in zip(x, x[1:])):
            raise ValueError("Tabulated support points must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "density", d)
        xs, ds = np.array(x), np.array(d)
        raw = float(np.sum(0.5 * (ds[1:] + ds[:-1]) * np.diff(xs)))
        if not raw > 0:
            raise ValueError("Tabulated density has no mass")
        object.__setattr__(self, "_raw_mass", raw)

    lower = property(lambda self: self.x[0])
    upper = property(lambda self: self.x[-1])

    @property
    def _arrays(self):
        return np.array(self.x), np.array(self.density) / self._raw_mass

    def pdf(self, x):
        xs, ds = self._arrays
        return np.interp(np.asarray(x, float), xs, ds, left=0.0, right=0.0)

    def _cell_cdf(self):
        xs, ds = self._arrays
        cells = 0.5 * (ds[1:] + ds[:-1]) * np.diff(xs)
        return xs, ds, np.concatenate([[0.0], np.cumsum(cells)])

    def cdf(self, x):
        xs, ds, cum = self._cell_cdf()
        x = np.clip(np.asarray(x, float), xs[0], xs[-1])
        k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
        h = x - xs[k]
        slope = (ds[k + 1] - ds[k]) / (xs[k + 1] - xs[k])
        return np.minimum(cum[k] + ds[k] * h + 0.5 * slope * h * h, 1.0) / cum[-1]

    def ppf(self, u):
        xs, ds, cum = self._cell_cdf()
        target = np.asarray(u, float) * cum[-1]
        k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(xs) - 2)
        r = target - cum[k]
        slope = (ds[k + 1] - ds[k]) / (xs[k + 1] - xs[k])
        # solve ds[k]*h + slope*h^2/2 = r, stable root form
        disc = np.sqrt(np.maximum(ds[k] ** 2 + 2.0 * slope * r, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(disc + ds[k] > 0, 2.0 * r / (ds[k] + disc), 0.0)
        return np.minimum(xs[k] + h, xs[k + 1])

    def scaled(self, c: float) -> "Tabulated":
        return Tabulated(tuple(v * c for v in self.x), self.density)


Family = Union[Uniform, Beta, ShiftedLognormal, Tabulated]


@dataclass(frozen=True)
class DensityGamble:
    """A gamble with a strictly positive density on [lower, upper]."""

    family: Family

    @property
    def lower(self) -> float:
        return self.family.lower

    @property
    def upper(self) -> float:
        return self.family.upper

    @property
    def compact(self) -> bool:
        return math.isfinite(self.upper)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.family.x if isinstance(self.family, Tabulated) else ()

    def pdf(self, x):
        return self.family.pdf(x)

    def cdf(self, x):
        return self.family.cdf(x)

    def ppf(self, u):
        return self.family.ppf(u)

    def sample(self, u: np.ndarray) -> np.ndarray:
        return self.family.ppf(u)

    def scaled(self, c: float) -> "DensityGamble":
        return DensityGamble(self.family.scaled(c))


Gamble = Union[DiscreteGamble, DensityGamble]


@dataclass(frozen=True)
class GambleStats:
    mean: float
    second_moment: float
    max_loss: float
    prob_negative: float
    max_gain: float = math.inf


def max_loss(g: Gamble) -> float:
    """Essential supremum of ``-X``."""
    if isinstance(g, DiscreteGamble):
        return float(-g.values.min())
    return -g.lower


def expectation(g: DensityGamble, h, tol: float = MOMENT_TOL, rtol: float = 1e-14):
    """``E[h(X)]`` by quadrature; ``h`` must be vectorized. Returns (value, error)."""
    fam = g.family
    if isinstance(fam, ShiftedLognormal):
        raise TypeError("use lognormal_expectation for half-line gambles")
    return integrate(
        lambda x: h(x) * fam.pdf(x), fam.lower, fam.upper, tol=tol, rtol=rtol,
        breakpoints=g.breakpoints or None,
    )


def lognormal_expectation(fam: ShiftedLognormal, h_of_y, growth: float = 0.0,
                          tol: float = MOMENT_TOL, rtol: float = 1e-14):
    """``E[h(X)]`` in the coordinate y = log(X - theta) where the law is Gaussian."""
    lo, hi = fam.log_space_range(growth)
    return integrate(lambda y: h_of_y(y) * fam.normal_pdf(y), lo, hi, tol=tol, rtol=rtol, initial=16)


def _density_moments(g: DensityGamble) -> tuple[float, float, float]:
    fam = g.family
    if isinstance(fam, ShiftedLognormal):
        th = fam.theta
        mass, _ = lognormal_expectation(fam, lambda y: np.ones_like(y))
        m1, _ = lognormal_expectation(fam, lambda y: th + np.exp(y), growth=1.0)
        m2, _ = lognormal_expectation(fam, lambda y: (th + np.exp(y)) ** 2, growth=2.0)
        return mass, m1, m2
    mass, _ = expectation(g, lambda x: np.ones_like(x))
    m1, _ = expectation(g, lambda x: x)
    m2, _ = expectation(g, lambda x: x * x)
    return mass, m1, m2


def validate(g: Gamble) -> GambleStats:
    """Check the gamble preconditions and return its moments.

    Raises NotAGamble when the mean is not positive, there is no loss mass,
    or (for densities) the density is not a positive, normalized density.
    """
    if isinstance(g, DiscreteGamble):
        v, p = g.values, g.probs
        if len(v) < 2:
            raise NotAGamble("a discrete gamble needs at least 2 outcomes")
        if np.any(p <= 0.0):
            raise NotAGamble("all outcome probabilities must be > 0")
        total = math.fsum(p)
        if abs(total - 1.0) > DISCRETE_SUM_TOL:
            raise NotAGamble(f"probabilities sum to {total!r}, not 1")
        mean = math.fsum(v * p)
        m2 = math.fsum(v * v * p)
        prob_neg = math.fsum(p[v < 0])
        if not prob_neg > 0:
            raise NotAGamble("no outcome is a loss")
        if not mean > 0:
            raise NotAGamble(f"mean {mean:.6g} <= 0")
        return GambleStats(mean, m2, float(-v.min()), prob_neg, float(v.max()))

    if not isinstance(g, DensityGamble):
        raise TypeError(f"not a gamble type: {type(g).__name__}")
    fam = g.family
    # zeros allowed at the two endpoints only, like a Beta density
    if isinstance(fam, Tabulated) and (min(fam.density[1:-1], default=1.0) <= 0.0
                                       or min(fam.density) < 0.0):
        raise NotAGamble("tabulated density must be strictly positive inside its support")
    if not g.lower < 0:
        raise NotAGamble("support has no losses (lower end >= 0)")
    mass, mean, m2 = _density_moments(g)
    if abs(mass - 1.0) > DENSITY_MASS_TOL:
        raise NotAGamble(f"density integrates to {mass!r}, not 1")
    if not mean > 0:
        raise NotAGamble(f"mean {mean:.6g} <= 0")
    prob_neg = float(g.cdf(0.0))
    if not prob_neg > 0:
        raise NotAGamble("no loss mass")
    return GambleStats(mean, m2, -g.lower, prob_neg, g.upper)


# ---------------------------------------------------------------------------
# JSON


_FAMILY_FIELDS = {
    "uniform": (Uniform, ("a", "b")),
    "beta": (Beta, ("alpha", "beta", "a", "b")),
    "lognormal": (ShiftedLognormal, ("mu", "sigma", "theta")),
    "tabulated": (Tabulated, ("x", "density")),
}


def _check_keys(d: Mapping[str, Any], allowed: set[str], what: str) -> None:
    unknown = set(d) - allowed
    missing = allowed - set(d)
    if unknown:
        raise NotAGamble(f"unknown field(s) in {what}: {sorted(unknown)}")
    if missing:
        raise NotAGamble(f"missing field(s) in {what}: {sorted(missing)}")


def gamble_from_dict(d: Mapping[str, Any]) -> Gamble:
    """Parse the JSON gamble schema; raises NotAGamble on schema errors."""
    if not isinstance(d, Mapping):
        raise NotAGamble("gamble spec must be a JSON object")
    kind = d.get("type")
    try:
        if kind == "discrete":
            _check_keys(d, {"type", "outcomes"}, "discrete gamble")
            outcomes = d["outcomes"]
            if not isinstance(outcomes, list) or not all(
                isinstance(o, (list, tuple)) and len(o) == 2 for o in outcomes
            ):
                raise NotAGamble("outcomes must be a list of [value, probability] pairs")
            return DiscreteGamble.from_outcomes(outcomes)
        if kind == "density":
            name = d.get("family")
            if name not in _FAMILY_FIELDS:
                raise NotAGamble(f"unknown density family {name!r}")
            cls, params = _FAMILY_FIELDS[name]
            _check_keys(d, {"type", "family", *params}, f"{name} gamble")
            if cls is Tabulated:
                return DensityGamble(Tabulated(tuple(d["x"]), tuple(d["density"])))
            return DensityGamble(cls(*(float(d[k]) for k in params)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NotAGamble):
            raise
        raise NotAGamble(f"malformed gamble spec: {exc}") from exc
    raise NotAGamble(f"unknown gamble type {kind!r}")


def gamble_to_dict(g: Gamble) -> dict[str, Any]:
    if isinstance(g, DiscreteGamble):
        return {"type": "discrete", "outcomes": [list(o) for o in g.outcomes]}
    for name, (cls, params) in _FAMILY_FIELDS.items():
        if isinstance(g.family, cls):
            out: dict[str, Any] = {"type": "density", "family": name}
            for k in params:
                val = getattr(g.family, k)
                out[k] = list(val) if isinstance(val, tuple) else val
            return out
    raise TypeError(f"unsupported family {type(g.family).__name__}")
