"""Dyadic discretizations X_n <= X of density gambles and the induced lambda_n.

Level n puts an atom at the left edge of every cell of a dyadic grid, carrying
the probability of that cell, so X_n increases to X. On a compact support
[-L, M] the grid has 2^n cells. On [-L, inf) the cells have width L/2^n up to
-L + nL, and everything above lands in one overflow atom at -L + nL.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import RiskinessResult, riskiness, static_riskiness
from .errors import NotAGamble, NotYetAGamble
from .gamble import DensityGamble, DiscreteGamble

MONOTONE_SLACK = 1e-12
DEFAULT_N_MAX_COMPACT = 15
DEFAULT_N_MAX_HALF_LINE = 12


@dataclass(frozen=True, eq=False)
class DyadicApproximation:
    level: int
    atoms: np.ndarray
    masses: np.ndarray
    gamble: DiscreteGamble

    @property
    def mean(self) -> float:
        return math.fsum(self.atoms * self.masses)


def _grid(g: DensityGamble, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Atoms (left cell edges) and cell edges for level n."""
    L = -g.lower
    if g.compact:
        cells = 2**n
        edges = g.lower + (np.arange(cells + 1) / cells) * (g.upper - g.lower)
        edges[-1] = g.upper
        return edges[:-1], edges
    cells = n * 2**n
    edges = g.lower + (np.arange(cells + 1) / 2**n) * L
    return edges, edges


def discretize(g: DensityGamble, n: int) -> DyadicApproximation:
    """Level-n dyadic approximation; raises NotYetAGamble while its mean is <= 0."""
    if n < 1:
        raise ValueError("level must be a positive integer")
    atoms, edges = _grid(g, n)
    cdf = np.asarray(g.cdf(edges), dtype=float)
    cdf[0] = 0.0
    if g.compact:
        cdf[-1] = 1.0
        masses = np.diff(cdf)
    else:
        # cells below -L + nL plus the overflow atom at -L + nL
        masses = np.append(np.diff(cdf), 1.0 - cdf[-1])
    masses = np.maximum(masses, 0.0)
    keep = masses > 0.0
    induced = DiscreteGamble(atoms[keep], masses[keep])
    approx = DyadicApproximation(n, atoms, masses, induced)
    if not approx.mean > 0.0:
        raise NotYetAGamble(n, approx.mean)
    return approx


def step_value(g: DensityGamble, n: int, x):
    """X_n as a function of the outcome x of X."""
    x = np.asarray(x, dtype=float)
    L = -g.lower
    if g.compact:
        cells = 2**n
        width = (g.upper - g.lower) / cells
        k = np.clip(np.floor((x - g.lower) / width), 0, cells - 1)
        return g.lower + k * width
    width = L / 2**n
    cap = g.lower + n * L
    k = np.floor((x - g.lower) / width)
    return np.where(x >= cap, cap, g.lower + np.maximum(k, 0) * width)


@dataclass(frozen=True)
class LevelResult:
    level: int
    lam: float
    rho: float
    residual: float


@dataclass(frozen=True)
class ConvergenceReport:
    levels: list[LevelResult]
    skipped: list[int]
    target: RiskinessResult
    monotone: bool
    limit_estimate: float = field(init=False)
    gap: float = field(init=False)

    def __post_init__(self):
        last = self.levels[-1].lam if self.levels else math.nan
        object.__setattr__(self, "limit_estimate", last)
        object.__setattr__(self, "gap", abs(last - self.target.lam))


def _level(g: DensityGamble, n: int):
    try:
        approx = discretize(g, n)
        res = static_riskiness(approx.gamble)
    except (NotYetAGamble, NotAGamble):
        return n, None
    return n, LevelResult(n, res.lam, res.rho, res.residual)


def lambda_sequence(
    g: DensityGamble,
    n_max: int | None = None,
    tie: str = "maximal-loss",
    workers: int = 1,
) -> ConvergenceReport:
    """lambda_n for n = 1..n_max next to 1/rho(X) of the density gamble itself.

    Levels whose discretization is not yet a gamble are recorded in
    ``skipped``. Levels are independent, so ``workers > 1`` solves them
    concurrently; the report is ordered by level either way.
    """
    if n_max is None:
        n_max = DEFAULT_N_MAX_COMPACT if g.compact else DEFAULT_N_MAX_HALF_LINE
    target = riskiness(g, tie=tie)
    levels = range(1, n_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda n: _level(g, n), levels))
    else:
        out = [_level(g, n) for n in levels]
    done = [r for _, r in out if r is not None]
    skipped = [n for n, r in out if r is None]
    monotone = all(b.lam >= a.lam - MONOTONE_SLACK for a, b in zip(done, done[1:]))
    return ConvergenceReport(done, skipped, target, monotone)
