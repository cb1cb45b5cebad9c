"""Figure rendering for the command-line report path.

Everything here draws onto the Agg backend and writes PNG files next to the
delimited output; nothing opens a window.  The CSV files remain the
authoritative record — these are companion visuals only, and every caller
exposes a --no-plot switch to skip them.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from scipy.special import gammaln  # noqa: E402

from .deterministic import SqrtProfile  # noqa: E402
from .model import PathSample  # noqa: E402
from .regimes import _c3_margin  # noqa: E402
from .stationary import GammaProduct  # noqa: E402


def _finish(fig, out_path: str) -> str:
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_trajectory(path: PathSample, out_path: str) -> str:
    """Coordinates against time plus the planar trace of one path."""
    fig, (ax_t, ax_xy) = plt.subplots(1, 2, figsize=(10, 4))
    ax_t.plot(path.times, path.xs, lw=0.8, label="x")
    ax_t.plot(path.times, path.ys, lw=0.8, label="y")
    ax_t.set_xlabel("t")
    ax_t.legend(frameon=False)
    ax_t.set_title("coordinates vs time")
    ax_xy.plot(path.xs, path.ys, lw=0.5, color="tab:purple")
    ax_xy.plot(path.xs[0], path.ys[0], "o", color="tab:green", ms=5)
    ax_xy.set_xlabel("x")
    ax_xy.set_ylabel("y")
    ax_xy.set_title("trace in the quadrant")
    for ax in (ax_t, ax_xy):
        ax.spines[["top", "right"]].set_visible(False)
    return _finish(fig, out_path)


def plot_endpoints(x_end: np.ndarray, y_end: np.ndarray, t_end: float,
                   out_path: str) -> str:
    """Histograms of the two endpoint coordinates over an ensemble."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, vals, name in ((axes[0], x_end, "x"), (axes[1], y_end, "y")):
        ax.hist(vals, bins=60, density=True, color="tab:blue", alpha=0.75)
        ax.set_xlabel(f"{name}(t={t_end:g})")
        ax.spines[["top", "right"]].set_visible(False)
    axes[0].set_ylabel("density")
    return _finish(fig, out_path)


def _gamma_pdf(x: np.ndarray, shape: float, rate: float) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = np.exp(shape * math.log(rate) + (shape - 1.0) * np.log(xp)
                      - rate * xp - gammaln(shape))
    return out


def plot_stationary(samples: np.ndarray, gp: GammaProduct,
                    out_path: str) -> str:
    """Sampled marginals with the product-of-gammas densities overlaid."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    specs = ((axes[0], samples[:, 0], gp.a, gp.c, "x"),
             (axes[1], samples[:, 1], gp.b, gp.d, "y"))
    for ax, vals, shape, rate, name in specs:
        ax.hist(vals, bins=80, density=True, color="tab:gray", alpha=0.6,
                label="samples")
        grid = np.linspace(0.0, float(np.max(vals)) * 1.02, 400)
        ax.plot(grid, _gamma_pdf(grid, shape, rate), color="tab:red",
                lw=1.5, label=f"gamma({shape:g}, rate {rate:g})")
        ax.set_xlabel(name)
        ax.legend(frameon=False)
        ax.spines[["top", "right"]].set_visible(False)
    axes[0].set_ylabel("density")
    return _finish(fig, out_path)


def plot_hitting(frac_x: float, frac_y: float, frac_corner: float,
                 halfwidth: float, out_path: str) -> str:
    """Bar chart of hit fractions with the x-wall 95% interval."""
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = ["x wall", "y wall", "corner"]
    fracs = [frac_x, frac_y, frac_corner]
    ax.bar(labels, fracs, color=["tab:blue", "tab:orange", "tab:red"],
           alpha=0.8)
    ax.errorbar([0], [frac_x], yerr=[halfwidth], fmt="none",
                ecolor="black", capsize=4)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("fraction of paths hitting by t_end")
    ax.spines[["top", "right"]].set_visible(False)
    return _finish(fig, out_path)


def plot_sqrt_profile(path: PathSample, profile: SqrtProfile,
                      out_path: str) -> str:
    """x/sqrt(t) and y/sqrt(t) against the constants they should approach."""
    fig, ax = plt.subplots(figsize=(6, 4))
    pos = path.times > 0
    t = path.times[pos]
    ax.plot(t, path.xs[pos] / np.sqrt(t), lw=1.0, label="x/√t")
    ax.plot(t, path.ys[pos] / np.sqrt(t), lw=1.0, label="y/√t")
    ax.axhline(profile.c, color="tab:blue", ls="--", lw=0.8)
    ax.axhline(profile.d, color="tab:orange", ls="--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("scaled coordinate")
    ax.legend(frameon=False)
    ax.spines[["top", "right"]].set_visible(False)
    return _finish(fig, out_path)


def plot_corner_margin(params, out_path: str, n: int = 801) -> str:
    """Corner-polarity certificate margin across the weight simplex."""
    lams = np.linspace(0.0, 1.0, n + 2)[1:-1]
    margins = np.array([_c3_margin(params, lam, 1.0 - lam) for lam in lams])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lams, margins, lw=1.2)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("λ (weight on x, μ = 1 − λ)")
    ax.set_ylabel("certificate margin")
    ax.spines[["top", "right"]].set_visible(False)
    return _finish(fig, out_path)
