"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one PASS/FAIL line. Run directly for a plain report:

    python tests/test_acceptance.py
"""

from __future__ import annotations

import math
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from riskiness import (
    Beta, DensityGamble, DiscreteGamble, Regime, UnboundedGambleWarning, Uniform,
    acceptance_wealth_bound, extended_riskiness, max_loss, phi, phi_derivative,
    riskiness, static_riskiness,
)
from riskiness.dyadic import lambda_sequence, step_value
from riskiness.phi import boundary_lambda
from riskiness.simulate import SimulationSpec, simulate, submartingale_check
from riskiness.sweep import SweepSpec, locate_boundaries, run_sweep
from riskiness.tree import GambleTree, conditional_riskiness, time_consistency_check

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
BERNOULLI = DiscreteGamble([200.0, -100.0], [0.5, 0.5])


def timed(fn, repeat=1):
    """(result, best wall time in seconds)."""
    best, out = math.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def criterion_1():
    static_riskiness(BERNOULLI)  # warm-up
    res, dt = timed(lambda: static_riskiness(BERNOULLI), repeat=20)
    err = abs(res.rho - 2000.0) / 2000.0
    ok = err <= 1e-9 and dt < 1e-3
    return ok, f"rho={res.rho:.12g} (target 2000, rel err {err:.2e}); {dt * 1e3:.3f} ms"


def criterion_2():
    g = DensityGamble(Uniform(-100.0, 200.0))
    extended_riskiness(g)

    def run():
        return phi(g, 0.01), extended_riskiness(g)

    (edge, res), dt = timed(run, repeat=10)
    err = abs(edge.value - (math.log(3.0) - 1.0))
    ok = err <= 1e-8 and res.regime is Regime.MAXIMAL_LOSS and res.rho == 100.0 and dt < 1e-2
    return ok, f"phi(1/100) err {err:.1e}, regime {res.regime.value}, rho={res.rho:g}; {dt * 1e3:.2f} ms"


SWEEPS = {
    "uniform": ("sweep_uniform.json", 100.0 * (math.e - 1.0)),
    "beta": ("sweep_beta.json", 3.05),
    "lognormal": ("sweep_lognormal.json", -math.e),
}


def criterion_3(family):
    import json

    name, target = SWEEPS[family]
    spec = SweepSpec.from_dict(json.loads((SAMPLES / name).read_text()))

    def run():
        rows = run_sweep(spec)
        return locate_boundaries(spec, rows)

    bounds, dt = timed(run)
    if len(bounds) != 1:
        return False, f"{len(bounds)} regime flips located; {dt:.1f} s"
    crit = bounds[0].critical
    ok = abs(crit - target) <= 0.01 and dt < 30.0
    return ok, f"critical {crit:.6f} vs {target:.4f} (|diff| {abs(crit - target):.4f}); {dt:.1f} s"


def _tree(u1, d1, u2, d2):
    leaf = lambda x: {"p": 0.5, "payoff": x}
    return GambleTree.from_dict({"children": [
        {"p": 0.5, "name": "state1", "children": [leaf(u1), leaf(d1)]},
        {"p": 0.5, "name": "state2", "children": [leaf(u2), leaf(d2)]},
    ]})


def criterion_4():
    def run():
        x1, x2 = _tree(600, -100, 1000, -200), _tree(840, -105, 6000, -240)
        depth1 = [conditional_riskiness(t, s).rho for t in (x1, x2) for s in ("state1", "state2")]
        roots = conditional_riskiness(x1, "root").rho, conditional_riskiness(x2, "root").rho
        return depth1, roots, time_consistency_check(x1, x2)

    (depth1, roots, rep), dt = timed(run)
    exact = max(abs(r - e) for r, e in zip(depth1, (120, 250, 120, 250)))
    ok = (exact <= 1e-9 and abs(roots[0] - 219.426) <= 1e-2 and abs(roots[1] - 243.76) <= 1e-2
          and rep.violated and dt < 0.1)
    return ok, (f"depth-1 max err {exact:.1e}; roots {roots[0]:.4f}, {roots[1]:.4f}; "
                f"violation {rep.violated}; {dt * 1e3:.1f} ms")


def criterion_5():
    def run():
        return (lambda_sequence(DensityGamble(Uniform(-100.0, 150.0)), n_max=15),
                lambda_sequence(DensityGamble(Uniform(-100.0, 200.0)), n_max=15))

    (a, b), dt = timed(run)
    lam15_b = b.levels[-1].lam
    ok = (a.levels[-1].level == 15 and a.gap <= 1e-3 and a.monotone
          and b.levels[-1].level == 15 and lam15_b >= 0.0099 and dt < 10.0)
    return ok, (f"b=150 gap {a.gap:.2e} monotone {a.monotone}; b=200 lambda_15={lam15_b:.6g}; {dt:.1f} s")


def criterion_6():
    spec = SimulationSpec((BERNOULLI,), 2000.0, 10_000, 10_000, 20240101, 1.0)

    def run():
        stats = simulate(spec)
        return stats, submartingale_check(stats, confidence=0.99)

    (stats, rep), dt = timed(run)
    positive = bool(np.all(stats.min_wealth > 0))
    ok = positive and rep.passed and dt < 60.0
    return ok, (f"min wealth {stats.min_wealth.min():g}, all positive {positive}; mean log increment "
                f"{rep.mean:.3e} >= -{rep.half_width:.1e}: {rep.passed}; {dt:.1f} s")


def _random_gambles(rng, n):
    out = []
    while len(out) < n:
        kind = len(out) % 3
        if kind == 0:
            k = int(rng.integers(2, 7))
            vals = np.concatenate([-rng.uniform(1, 500, 1), rng.uniform(-500, 2000, k - 1)])
            probs = rng.dirichlet(np.ones(k))
            g = DiscreteGamble(vals, probs)
            if not (vals.min() < 0 and float(vals @ probs) > 1e-3 * np.abs(vals).max()):
                continue
        elif kind == 1:
            loss = rng.uniform(1, 1000)
            g = DensityGamble(Uniform(-loss, loss * rng.uniform(1.05, 4.0)))
        else:
            g = DensityGamble(Beta(rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0), -100.0, 200.0))
            a, b = g.family.alpha, g.family.beta
            if (a * 200.0 - b * 100.0) / (a + b) <= 1.0:
                continue
        out.append(g)
    return out


def criterion_7():
    rng = np.random.default_rng(20240607)
    gambles = _random_gambles(rng, 120)
    densities = [g for g in _random_gambles(rng, 160) if isinstance(g, DensityGamble)][:100]
    failures = {k: 0 for k in ("concavity", "derivative", "homogeneity", "rho>=L", "wealth-bound",
                               "dyadic", "reproducibility")}
    for g in gambles:
        lam_star = boundary_lambda(g)
        top = lam_star if isinstance(g, DensityGamble) else lam_star * (1 - 1e-3)
        a, b = sorted(rng.uniform(0, top, 2))
        mid = phi(g, 0.5 * (a + b))
        pa, pb = phi(g, a), phi(g, b)
        if mid.value < 0.5 * (pa.value + pb.value) - (mid.abs_error_bound + pa.abs_error_bound + pb.abs_error_bound):
            failures["concavity"] += 1
        lam, h = rng.uniform(0.01, 0.95) * lam_star, 1e-6 * lam_star
        fd = (phi(g, lam + h).value - phi(g, lam - h).value) / (2 * h)
        d = phi_derivative(g, lam)
        if abs(d - fd) > 1e-4 * max(1.0, abs(d)):
            failures["derivative"] += 1
        res = riskiness(g, tie="maximal-loss")
        c = float(rng.choice([0.5, 2.0, 10.0]))
        if abs(riskiness(g.scaled(c), tie="maximal-loss").rho - c * res.rho) > 1e-8 * c * res.rho:
            failures["homogeneity"] += 1
        if res.rho < max_loss(g):
            failures["rho>=L"] += 1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnboundedGambleWarning)
            w0 = acceptance_wealth_bound(g)
        if phi(g, 1.0 / w0).value < -1e-10:
            failures["wealth-bound"] += 1
        spec = SimulationSpec((g,), res.rho * rng.uniform(0.9, 3.0), 50, 20,
                              int(rng.integers(2**63)), min(1.0, max_loss(g)))
        s1, s2 = simulate(spec), simulate(spec, workers=2)
        if not (s1.to_dict() == s2.to_dict() and s1.increments == s2.increments):
            failures["reproducibility"] += 1
    for g in densities:
        x = g.ppf(rng.uniform(0, 1, 200))
        n = int(rng.integers(1, 14))
        xn, xn1 = step_value(g, n, x), step_value(g, n + 1, x)
        rep = lambda_sequence(g, n_max=8, tie="maximal-loss")
        if not (np.all(xn <= xn1) and np.all(xn1 <= x) and rep.monotone):
            failures["dyadic"] += 1
    bad = {k: v for k, v in failures.items() if v}
    return not bad, (f"{len(gambles)} random gambles, {len(densities)} for dyadic domination; "
                     f"failures: {bad or 'none'}")


CRITERIA = {
    "1 Bernoulli exactness": criterion_1,
    "2 Boundary value": criterion_2,
    "3 Critical parameter (uniform)": lambda: criterion_3("uniform"),
    "3 Critical parameter (beta)": lambda: criterion_3("beta"),
    "3 Critical parameter (lognormal)": lambda: criterion_3("lognormal"),
    "4 Two-period trees": criterion_4,
    "5 Dyadic convergence": criterion_5,
    "6 No-bankruptcy surrogate": criterion_6,
    "7 Property suites": criterion_7,
}


def report(name, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}"
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, capsys):
    ok, line = report(name, CRITERIA[name])
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    for name, fn in CRITERIA.items():
        print(report(name, fn)[1], flush=True)
