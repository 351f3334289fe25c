"""Parameter sweeps of the extended riskiness over a density family.

Each grid point yields (param, rho, lambda, regime). Grid points that are not
gambles, or whose boundary sign is within its error bound, keep their row with
a marker instead of being dropped. Regime flips between neighbouring rows are
refined to the critical parameter where phi(1/L) = 0.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np
from scipy.optimize import brentq

from .core import ROOT_TOL, extended_riskiness
from .errors import BoundarySignAmbiguous, NotAGamble, SpecInvalid
from .gamble import _FAMILY_FIELDS, DensityGamble
from .phi import boundary_lambda, phi

NOT_A_GAMBLE = "not-a-gamble"
AMBIGUOUS = "ambiguous"
CSV_COLUMNS = ("param", "rho", "lambda", "regime")


@dataclass(frozen=True)
class SweepSpec:
    family: str
    fixed: dict[str, float]
    param: str
    lo: float
    hi: float
    step: float
    out: Optional[str] = None

    def __post_init__(self):
        if self.family not in _FAMILY_FIELDS or self.family == "tabulated":
            raise SpecInvalid(f"cannot sweep family {self.family!r}")
        _, names = _FAMILY_FIELDS[self.family]
        expected = set(names)
        if self.param not in expected:
            raise SpecInvalid(f"{self.param!r} is not a parameter of {self.family}")
        if set(self.fixed) != expected - {self.param}:
            raise SpecInvalid(f"fixed parameters must be exactly {sorted(expected - {self.param})}")
        if not (self.step > 0 and self.hi >= self.lo):
            raise SpecInvalid("need step > 0 and hi >= lo")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SweepSpec":
        allowed = {"family", "fixed", "param", "lo", "hi", "step", "out"}
        unknown = set(d) - allowed
        if unknown:
            raise SpecInvalid(f"unknown field(s): {sorted(unknown)}")
        try:
            return cls(
                str(d["family"]),
                {k: float(v) for k, v in dict(d["fixed"]).items()},
                str(d["param"]),
                float(d["lo"]),
                float(d["hi"]),
                float(d["step"]),
                d.get("out"),
            )
        except KeyError as exc:
            raise SpecInvalid(f"missing field {exc.args[0]!r}") from exc

    def grid(self) -> np.ndarray:
        """Inclusive grid lo, lo+step, ..., hi (hi kept when it is a grid point)."""
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9))
        pts = self.lo + self.step * np.arange(n + 1)
        # strip representation noise from lo + i*step
        return np.array([float(f"{p:.12g}") for p in pts])

    def gamble(self, value: float) -> DensityGamble:
        cls, names = _FAMILY_FIELDS[self.family]
        params = dict(self.fixed)
        params[self.param] = value
        return DensityGamble(cls(*(params[k] for k in names)))


@dataclass(frozen=True)
class SweepRow:
    param: float
    rho: float
    lam: float
    regime: str


@dataclass(frozen=True)
class Boundary:
    lower: float
    upper: float
    critical: float
    below: str
    above: str


def _evaluate(spec: SweepSpec, value: float, tol: float) -> SweepRow:
    try:
        g = spec.gamble(value)
        res = extended_riskiness(g, tol=tol)
    except (NotAGamble, ValueError):
        return SweepRow(value, math.nan, math.nan, NOT_A_GAMBLE)
    except BoundarySignAmbiguous:
        return SweepRow(value, math.nan, math.nan, AMBIGUOUS)
    return SweepRow(value, res.rho, res.lam, res.regime.value)


def run_sweep(spec: SweepSpec, tol: float = ROOT_TOL, workers: int = 1) -> list[SweepRow]:
    """One row per grid point, ordered by parameter value."""
    grid = spec.grid()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda v: _evaluate(spec, float(v), tol), grid))
    return [_evaluate(spec, float(v), tol) for v in grid]


def boundary_sign(spec: SweepSpec, value: float) -> float:
    """phi(1/L) of the gamble at ``value``; its sign selects the regime."""
    g = spec.gamble(value)
    return phi(g, boundary_lambda(g)).value


def locate_boundaries(spec: SweepSpec, rows: list[SweepRow], xtol: float = 1e-10) -> list[Boundary]:
    """Refine each regime flip between neighbouring classified rows by bracketing
    the zero of phi(1/L) in the parameter."""
    # ambiguous rows sit on the boundary itself; bracket across them
    classified = [r for r in rows if r.regime in ("equation-solved", "maximal-loss")]
    out = []
    for a, b in zip(classified, classified[1:]):
        if a.regime == b.regime:
            continue
        fa, fb = boundary_sign(spec, a.param), boundary_sign(spec, b.param)
        if fa * fb > 0:
            continue
        crit = brentq(lambda v: boundary_sign(spec, v), a.param, b.param, xtol=xtol)
        out.append(Boundary(a.param, b.param, crit, a.regime, b.regime))
    return out


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.17g}"


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow((_fmt(r.param), _fmt(r.rho), _fmt(r.lam), r.regime))
    return buf.getvalue()
