"""Figure rendering for the analysis report path.

Everything here writes PNG files with the Agg backend so reports render
on headless machines; the delimited outputs stay the machine-readable
source of truth and these figures are their visual companions.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analysis import Histogram, PowerLawFit


def plot_curve(
    iterations,
    values,
    ylabel: str,
    path,
    title: str = "",
    log_y: bool = False,
) -> Path:
    """One labelled line over iterations, written to path."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(iterations, values, linewidth=1.2)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_histogram(
    histogram: Histogram,
    path,
    log_log: bool = False,
    fit: PowerLawFit | None = None,
    title: str = "",
) -> Path:
    """Positive-increment histogram, optionally log-log with the fitted tail.

    Normalized frequencies are drawn as points against bin centers; when a
    fit is supplied, the matching power-law curve (scaled to the plotted
    normalization at its cutoff) is dashed over the data.
    """
    centers = histogram.bin_edges[:-1] + histogram.bin_size / 2.0
    freqs = (
        histogram.normalized
        if histogram.normalized is not None
        else histogram.counts
    )
    mask = histogram.counts > 0
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(centers[mask], freqs[mask], "o", markersize=4, label="positive increments")
    if fit is not None and np.any(mask):
        xs = np.linspace(max(fit.xmin_hat, centers[mask].min()), centers[mask].max(), 200)
        xs = xs[xs > 0]
        curve = (xs / fit.xmin_hat) ** (-fit.alpha_hat)
        anchor_idx = np.argmin(np.abs(centers[mask] - xs[0]))
        anchor = freqs[mask][anchor_idx]
        if anchor > 0:
            ax.plot(xs, curve * anchor, "--", label=f"power law (alpha={fit.alpha_hat:.2f})")
    if log_log:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("increment size")
    ax.set_ylabel("normalized frequency")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
