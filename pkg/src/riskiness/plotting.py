"""Figure rendering for the CLI report paths (written to files, never shown)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dyadic import ConvergenceReport  # noqa: E402
from .gamble import Gamble  # noqa: E402
from .phi import boundary_lambda, phi_curve  # noqa: E402
from .sweep import Boundary, SweepRow, SweepSpec  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0


def _figure(ncols: int = 1, width: float = 6.0):
    fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, width * GOLDEN), squeeze=False)
    return fig, axes[0]


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_phi(g: Gamble, path, points: int = 201) -> None:
    """phi(lambda) over [0, 1/L]."""
    lam_star = boundary_lambda(g)
    lams = np.linspace(0.0, lam_star, points)
    vals = phi_curve(g, lams)
    fig, (ax,) = _figure()
    ax.plot(lams, vals, color="C0")
    ax.axhline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$E\,\log(1+\lambda X)$")
    ax.set_xlim(0.0, lam_star)
    _save(fig, path)


def plot_sweep(spec: SweepSpec, rows: list[SweepRow], boundaries: list[Boundary], path) -> None:
    """rho and lambda = 1/rho against the swept parameter, with 1/L overlaid."""
    ok = [r for r in rows if math.isfinite(r.rho)]
    x = np.array([r.param for r in ok])
    rho = np.array([r.rho for r in ok])
    lam = np.array([r.lam for r in ok])
    inv_loss = np.array([boundary_lambda(spec.gamble(v)) for v in x])
    fig, (ax_rho, ax_lam) = _figure(ncols=2, width=5.0)
    ax_rho.plot(x, rho, color="C0")
    ax_rho.set_ylabel(r"$\rho$")
    ax_lam.plot(x, inv_loss, color="0.6", ls="--", label=r"$1/L$")
    ax_lam.plot(x, lam, color="C1", label=r"$\lambda = 1/\rho$")
    ax_lam.set_ylabel(r"$\lambda$")
    ax_lam.legend(frameon=False)
    for ax in (ax_rho, ax_lam):
        ax.set_xlabel(spec.param)
        for b in boundaries:
            ax.axvline(b.critical, color="C3", lw=0.8, ls=":")
    ax_rho.set_yscale("log")
    _save(fig, path)


def plot_convergence(report: ConvergenceReport, path) -> None:
    n = [lv.level for lv in report.levels]
    lam = [lv.lam for lv in report.levels]
    fig, (ax,) = _figure()
    ax.plot(n, lam, "o-", color="C0", label=r"$\lambda_n$")
    ax.axhline(report.target.lam, color="C3", ls="--", lw=0.8, label=r"$1/\rho(X)$")
    ax.set_xlabel("level n")
    ax.set_ylabel(r"$\lambda_n$")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_wealth(trajectories: np.ndarray, path) -> None:
    fig, (ax,) = _figure()
    t = np.arange(trajectories.shape[1])
    for row in trajectories:
        ax.plot(t, row, lw=0.6, alpha=0.7)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$W_t$")
    _save(fig, path)
