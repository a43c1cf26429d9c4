"""Criticality-detection toolkit.

The swarm-size signal is the mean square distance (MSD) from every
particle to the swarm centroid. Its strictly positive increments between
consecutive samples are binned into a histogram and fitted with a
continuous power law by maximum likelihood; a heavy tail well described
by the fit (and better than an exponential alternative, by KS distance)
is the criticality fingerprint.

The fitting procedure follows the standard MLE recipe: for a candidate
lower cutoff xmin the tail exponent is

    alpha_hat = 1 + n * (sum_i ln(x_i / xmin))**-1,

and xmin itself is chosen to minimize the Kolmogorov-Smirnov distance
between the tail's empirical CDF and the fitted CDF, scanning candidates
taken from the sample's unique values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .adaptive import MetricId, measure
from .core import SwarmState
from .errors import ConfigurationError, DegenerateDataError

# Tails thinner than this are fit anyway but flagged low-confidence.
MIN_TAIL = 50

# Histogram defaults for positive-increment plots.
DEFAULT_BIN_SIZE = 0.2
DEFAULT_RANGE = (0.0, 25.0)


class PdfKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class Histogram:
    """Fixed-width binning of values over a half-open range."""

    bin_size: float
    range_min: float
    range_max: float
    counts: np.ndarray
    normalized: Optional[np.ndarray] = None

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    @property
    def bin_edges(self) -> np.ndarray:
        return self.range_min + self.bin_size * np.arange(self.n_bins + 1)


@dataclass(frozen=True)
class PowerLawFit:
    """Continuous power-law tail fit: exponent, cutoff, and fit quality."""

    alpha_hat: float
    xmin_hat: float
    n_tail: int
    ks: float
    low_confidence: bool


@dataclass(frozen=True)
class ExponentialFit:
    """Shifted-exponential tail fit used as the comparison alternative."""

    rate: float
    xmin: float
    n_tail: int
    ks: float


def msd_to_centroid(state: SwarmState) -> float:
    """Mean squared distance from each particle to the coordinate-wise centroid."""
    if state.n_particles < 2:
        raise ConfigurationError("msd needs at least 2 particles")
    with np.errstate(over="ignore", invalid="ignore"):
        centroid = state.positions.mean(axis=0)
        sq = np.sum((state.positions - centroid) ** 2, axis=1)
        return float(sq.mean())


def positive_increments(series: Sequence[float]) -> np.ndarray:
    """Strictly positive consecutive differences, in order.

    Zero and negative increments are dropped; non-finite differences (from
    overflowed traces) are dropped too.
    """
    values = np.asarray(series, dtype=float)
    if values.size < 2:
        return np.empty(0)
    with np.errstate(invalid="ignore"):
        diffs = np.diff(values)
        return diffs[np.isfinite(diffs) & (diffs > 0)]


def build_histogram(
    values: Sequence[float],
    bin_size: float = DEFAULT_BIN_SIZE,
    range_min: float = DEFAULT_RANGE[0],
    range_max: float = DEFAULT_RANGE[1],
) -> Histogram:
    """Count values into half-open bins [lo, lo + bin_size); out-of-range dropped.

    Normalized frequencies are rescaled so the largest count maps to 1 and
    the smallest to 0 (all zeros when every bin has the same count).
    """
    if not bin_size > 0:
        raise ConfigurationError(f"bin_size must be > 0, got {bin_size}")
    if not range_max > range_min:
        raise ConfigurationError("range_max must exceed range_min")
    n_bins = math.ceil((range_max - range_min) / bin_size)
    values = np.asarray(values, dtype=float)
    counts = np.zeros(n_bins, dtype=int)
    if values.size:
        in_range = (values >= range_min) & (values < range_max)
        idx = np.floor((values[in_range] - range_min) / bin_size).astype(int)
        idx = np.minimum(idx, n_bins - 1)  # guard float-edge spill
        np.add.at(counts, idx, 1)
    lo, hi = counts.min(), counts.max()
    if hi > lo:
        normalized = (counts - lo) / (hi - lo)
    else:
        normalized = np.zeros(n_bins)
    return Histogram(
        bin_size=bin_size,
        range_min=range_min,
        range_max=range_max,
        counts=counts,
        normalized=normalized,
    )


def _tail_ks(sorted_tail: np.ndarray, cdf: np.ndarray) -> float:
    """Two-sided KS distance between a sorted sample and fitted CDF values."""
    n = len(sorted_tail)
    steps_hi = np.arange(1, n + 1) / n
    steps_lo = np.arange(0, n) / n
    return float(max(np.max(steps_hi - cdf), np.max(cdf - steps_lo)))


def fit_power_law(samples: Sequence[float]) -> PowerLawFit:
    """MLE fit of a continuous power-law tail, scanning xmin candidates.

    Candidates are the sample's unique values. Candidates leaving fewer
    than MIN_TAIL points in the tail are considered only when no candidate
    reaches that size; the result is then flagged low-confidence.

    Raises DegenerateDataError when the sample has fewer than two distinct
    values (all identical included) or any non-positive entry.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size < 2:
        raise DegenerateDataError(f"need at least 2 samples, got {xs.size}")
    if np.any(xs <= 0) or not np.all(np.isfinite(xs)):
        raise DegenerateDataError("samples must be positive and finite")
    uniq = np.unique(xs)
    if uniq.size < 2:
        raise DegenerateDataError("need at least 2 distinct sample values")

    n = xs.size
    log_xs = np.log(xs)
    # suffix_logsum[i] = sum of log(xs[i:])
    suffix_logsum = np.concatenate([np.cumsum(log_xs[::-1])[::-1], [0.0]])

    candidates = uniq[:-1]  # the top value leaves no spread in the tail
    tail_sizes = n - np.searchsorted(xs, candidates, side="left")
    eligible = tail_sizes >= MIN_TAIL
    low_confidence = not np.any(eligible)
    if not low_confidence:
        candidates = candidates[eligible]

    best = None
    for xmin in candidates:
        i = int(np.searchsorted(xs, xmin, side="left"))
        m = n - i
        log_sum = suffix_logsum[i] - m * math.log(xmin)
        if log_sum <= 0:
            continue
        alpha = 1.0 + m / log_sum
        tail = xs[i:]
        cdf = 1.0 - (tail / xmin) ** (1.0 - alpha)
        ks = _tail_ks(tail, cdf)
        if best is None or ks < best[0]:
            best = (ks, float(alpha), float(xmin), m)
    if best is None:
        raise DegenerateDataError("no usable xmin candidate (sample too degenerate)")
    ks, alpha, xmin, m = best
    return PowerLawFit(
        alpha_hat=alpha,
        xmin_hat=xmin,
        n_tail=m,
        ks=ks,
        low_confidence=low_confidence or m < MIN_TAIL,
    )


def fit_exponential_tail(samples: Sequence[float], xmin: float) -> ExponentialFit:
    """MLE shifted-exponential fit of the tail x >= xmin, with KS distance.

    Rate 1/(mean - xmin), CDF 1 - exp(-rate*(x - xmin)) over the tail.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    tail = xs[xs >= xmin]
    if tail.size < 2:
        raise DegenerateDataError(f"fewer than 2 samples at or above {xmin}")
    mean_excess = float(tail.mean() - xmin)
    if mean_excess <= 0:
        raise DegenerateDataError("tail has no spread above xmin")
    rate = 1.0 / mean_excess
    cdf = 1.0 - np.exp(-rate * (tail - xmin))
    return ExponentialFit(rate=rate, xmin=float(xmin), n_tail=int(tail.size), ks=_tail_ks(tail, cdf))


def fit_exponential(samples: Sequence[float]) -> ExponentialFit:
    """The exponential alternative: MLE shifted to the sample minimum.

    The power law is a tail model and gets its cutoff scan; the exponential
    is a global model and is fitted per its own canon, to the whole sample.
    Comparing fit_power_law(x).ks against fit_exponential(x).ks prefers the
    correct model on synthetic data from either family, which is the
    property the criticality check relies on.
    """
    xs = np.asarray(samples, dtype=float)
    if xs.size < 2:
        raise DegenerateDataError(f"need at least 2 samples, got {xs.size}")
    return fit_exponential_tail(xs, float(xs.min()))


def power_law_pdf(
    x: float,
    alpha: float,
    xmin: float,
    kind: PdfKind = PdfKind.CONTINUOUS,
) -> float:
    """Normalized power-law density (continuous) or mass (discrete) at x.

    Continuous: ((alpha-1)/xmin) * (x/xmin)**-alpha on [xmin, inf).
    Discrete: x**-alpha / zeta(alpha, xmin) with the Hurwitz zeta
    normalizer, x on {xmin, xmin+1, ...}.
    """
    if not alpha > 1:
        raise ConfigurationError(f"alpha must exceed 1, got {alpha}")
    if not xmin > 0:
        raise ConfigurationError(f"xmin must be > 0, got {xmin}")
    if x < xmin:
        raise ConfigurationError(f"x={x} below lower cutoff xmin={xmin}")
    kind = PdfKind(kind)
    if kind == PdfKind.CONTINUOUS:
        return float((alpha - 1.0) / xmin * (x / xmin) ** (-alpha))
    return float(x ** (-alpha) / hurwitz_zeta(alpha, xmin))
