"""Monte Carlo wealth processes under the riskiness acceptance rule.

At each step the offered gamble is accepted iff E log(1 + X/W_t) >= 0, i.e.
iff W_t >= rho(X). On acceptance W_{t+1} = W_t + X_{t+1}, otherwise wealth is
left untouched. Every path has its own random stream spawned from the master
seed by path index, so results do not depend on chunking or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from scipy import stats as sps

from .core import RiskinessResult, accept, riskiness
from .errors import InsufficientEvents, NotAGamble, SpecInvalid
from .gamble import DiscreteGamble, Gamble, gamble_from_dict, gamble_to_dict, max_loss, validate

THRESHOLDS = (1e-1, 1e-3, 1e-6)
MIN_EVENTS = 10_000
CHUNK = 1024


@dataclass(frozen=True)
class SimulationSpec:
    gambles: tuple[Gamble, ...]
    initial_wealth: float
    horizon: int
    paths: int
    seed: int
    min_loss_floor: float
    record_paths: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gambles", tuple(self.gambles))
        if not self.gambles:
            raise SpecInvalid("no gamble offered")
        if not self.initial_wealth > 0:
            raise SpecInvalid("initial wealth must be > 0")
        if not self.min_loss_floor > 0:
            raise SpecInvalid("minimal-loss floor must be > 0")
        if self.horizon < 1 or self.paths < 1:
            raise SpecInvalid("horizon and path count must be positive")
        if not 0 <= self.record_paths:
            raise SpecInvalid("record_paths must be >= 0")
        for i, g in enumerate(self.gambles):
            try:
                validate(g)
            except NotAGamble as exc:
                raise SpecInvalid(f"gamble {i}: {exc.reason}") from exc
            if not isinstance(g, DiscreteGamble) and not g.compact:
                raise SpecInvalid(f"gamble {i}: offered gambles need bounded support")
            if max_loss(g) < self.min_loss_floor:
                raise SpecInvalid(f"gamble {i}: maximal loss below the floor {self.min_loss_floor}")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SimulationSpec":
        allowed = {"gamble", "gambles", "initial_wealth", "horizon", "paths", "seed",
                   "min_loss_floor", "record_paths"}
        unknown = set(d) - allowed
        if unknown:
            raise SpecInvalid(f"unknown field(s): {sorted(unknown)}")
        if ("gamble" in d) == ("gambles" in d):
            raise SpecInvalid("give exactly one of 'gamble' or 'gambles'")
        raw = [d["gamble"]] if "gamble" in d else list(d["gambles"])
        try:
            gambles = tuple(gamble_from_dict(x) for x in raw)
            return cls(
                gambles,
                float(d["initial_wealth"]),
                int(d["horizon"]),
                int(d["paths"]),
                int(d.get("seed", 0)),
                float(d["min_loss_floor"]),
                int(d.get("record_paths", 0)),
            )
        except NotAGamble as exc:
            raise SpecInvalid(exc.reason) from exc
        except KeyError as exc:
            raise SpecInvalid(f"missing field {exc.args[0]!r}") from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "gambles": [gamble_to_dict(g) for g in self.gambles],
            "initial_wealth": self.initial_wealth,
            "horizon": self.horizon,
            "paths": self.paths,
            "seed": self.seed,
            "min_loss_floor": self.min_loss_floor,
            "record_paths": self.record_paths,
        }


@dataclass(frozen=True)
class IncrementSummary:
    """Count, mean and sum of squared deviations of log-wealth increments."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_array(cls, x: np.ndarray) -> "IncrementSummary":
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return cls()
        mean = float(x.mean())
        return cls(int(x.size), mean, float(np.sum((x - mean) ** 2)))

    @classmethod
    def from_sums(cls, count: int, total: float, total_sq: float) -> "IncrementSummary":
        if count == 0:
            return cls()
        mean = total / count
        return cls(count, mean, max(total_sq - count * mean * mean, 0.0))

    def merge(self, other: "IncrementSummary") -> "IncrementSummary":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return IncrementSummary(n, mean, m2)

    @property
    def std(self) -> float:
        return math.sqrt(self.m2 / (self.count - 1)) if self.count > 1 else math.nan


@dataclass(frozen=True, eq=False)
class WealthPathStats:
    initial_wealth: float
    final_wealth: np.ndarray
    min_wealth: np.ndarray
    accepted: np.ndarray
    rejected: np.ndarray
    increments: IncrementSummary
    riskiness: tuple[float, ...]
    trajectories: Optional[np.ndarray] = None
    below_fraction: dict[float, float] = field(init=False)

    def __post_init__(self):
        fr = {t: float(np.mean(self.min_wealth < t * self.initial_wealth)) for t in THRESHOLDS}
        object.__setattr__(self, "below_fraction", fr)

    def to_dict(self, per_path: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "initial_wealth": self.initial_wealth,
            "paths": int(self.final_wealth.size),
            "riskiness": list(self.riskiness),
            "min_wealth_overall": float(self.min_wealth.min()),
            "all_positive": bool(np.all(self.min_wealth > 0)),
            "fraction_min_below": {f"{t:g}": v for t, v in self.below_fraction.items()},
            "accepted_total": int(self.accepted.sum()),
            "rejected_total": int(self.rejected.sum()),
            "log_increment": {
                "count": self.increments.count,
                "mean": self.increments.mean,
                "std": self.increments.std,
            },
        }
        if per_path:
            out["per_path"] = {
                "final_wealth": self.final_wealth.tolist(),
                "min_wealth": self.min_wealth.tolist(),
                "accepted": self.accepted.tolist(),
                "rejected": self.rejected.tolist(),
            }
        return out


def _uniforms(seed: int, path_ids: Sequence[int], horizon: int) -> np.ndarray:
    """(horizon, n_paths) uniforms in (0, 1]; column j comes from path path_ids[j]'s stream."""
    root = np.random.SeedSequence(seed)
    u = np.empty((horizon, len(path_ids)))
    for j, pid in enumerate(path_ids):
        child = np.random.SeedSequence(root.entropy, spawn_key=(int(pid),))
        u[:, j] = 1.0 - np.random.Generator(np.random.PCG64(child)).random(horizon)
    return u


def _draws(spec: SimulationSpec, path_ids: Sequence[int]) -> np.ndarray:
    x = _uniforms(spec.seed, path_ids, spec.horizon)
    k = len(spec.gambles)
    for i, g in enumerate(spec.gambles):
        rows = slice(i, None, k)
        x[rows] = g.sample(x[rows])
    return x


def _run_chunk(spec: SimulationSpec, path_ids: Sequence[int], thresholds: np.ndarray,
               decide=None):
    x = _draws(spec, path_ids)
    T, n = x.shape
    w = np.empty((T + 1, n))
    w[0] = spec.initial_wealth
    acc = np.empty((T, n), dtype=bool)
    s1, s2 = np.zeros(n), np.zeros(n)
    for t in range(T):
        a = w[t] >= thresholds[t] if decide is None else decide(t, w[t])
        acc[t] = a
        w[t + 1] = np.where(a, w[t] + x[t], w[t])
        # per-path running sums keep the aggregate independent of chunking
        inc = np.log1p(np.where(a, x[t] / w[t], 0.0))
        s1 += inc
        s2 += inc * inc
    return w[-1].copy(), w.min(axis=0), acc.sum(axis=0), (~acc).sum(axis=0), s1, s2, w


def simulate(spec: SimulationSpec, workers: int = 1, route: str = "threshold") -> WealthPathStats:
    """Run every path of ``spec``.

    ``route="threshold"`` compares W_t with the precomputed riskiness of the
    offered gamble; ``route="phi"`` evaluates E log(1 + X/W_t) >= 0 at each
    step (slow, used to cross-check the two characterizations).
    """
    results: list[RiskinessResult] = [riskiness(g, tie="maximal-loss") for g in spec.gambles]
    rhos = np.array([r.rho for r in results])
    k = len(spec.gambles)
    per_step = rhos[np.arange(spec.horizon) % k]
    thresholds = per_step * (1.0 - 1e-9)

    if route == "phi":
        cache: dict[tuple[int, float], bool] = {}

        def decide(t, wealth):
            gi = t % k
            out = np.empty(wealth.shape, dtype=bool)
            for j, wv in enumerate(wealth):
                key = (gi, float(wv))
                if key not in cache:
                    cache[key] = accept(spec.gambles[gi], float(wv))
                out[j] = cache[key]
            return out
    elif route == "threshold":
        decide = None
    else:
        raise ValueError(f"unknown acceptance route {route!r}")

    chunks = [range(s, min(s + CHUNK, spec.paths)) for s in range(0, spec.paths, CHUNK)]
    run = lambda ids: _run_chunk(spec, ids, thresholds, decide)
    if workers > 1 and route == "threshold":
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(ids) for ids in chunks]

    accepted = np.concatenate([p[2] for p in parts])
    summary = IncrementSummary.from_sums(
        int(accepted.sum()),
        math.fsum(np.concatenate([p[4] for p in parts])),
        math.fsum(np.concatenate([p[5] for p in parts])),
    )
    trajectories = None
    if spec.record_paths:
        m = min(spec.record_paths, spec.paths)
        trajectories = np.concatenate([p[6] for p in parts], axis=1)[:, :m].T.copy()
    return WealthPathStats(
        spec.initial_wealth,
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        accepted,
        np.concatenate([p[3] for p in parts]),
        summary,
        tuple(float(r) for r in rhos),
        trajectories,
    )


@dataclass(frozen=True)
class SubmartingaleReport:
    mean: float
    half_width: float
    events: int
    passed: bool


def submartingale_check(
    stats: WealthPathStats | IncrementSummary,
    confidence: float = 0.99,
    min_events: int = MIN_EVENTS,
) -> SubmartingaleReport:
    """Mean log-wealth increment on acceptance must not fall below -z * s / sqrt(n)."""
    inc = stats.increments if isinstance(stats, WealthPathStats) else stats
    if inc.count < min_events:
        raise InsufficientEvents(f"{inc.count} acceptance events, need at least {min_events}")
    z = float(sps.norm.ppf(0.5 + confidence / 2.0))
    half = z * inc.std / math.sqrt(inc.count)
    return SubmartingaleReport(inc.mean, half, inc.count, inc.mean >= -half)
