"""Reference self-organized-criticality simulators.

These two canonical systems exist as end-to-end oracles for the power-law
fitting pipeline: their avalanche statistics are known to be heavy-tailed,
so a fitter that prefers an exponential on them is broken.

Sandpile (1-D, slope variables): driving adds a grain at a random site,
raising the local slope; any slope above its threshold topples, shedding
two units to its neighbours. The left edge is a closed wall, the right
edge is open and loses sand. Site thresholds are drawn from
{z_c, z_c + 1} and redrawn each time the site topples (the rice-pile
mechanism): with a single constant threshold a one-dimensional pile
organizes into the minimally stable profile where every avalanche sweeps
straight to the open edge and the size distribution degenerates to
uniform; the renewed random thresholds keep the pile genuinely critical
with heavy-tailed avalanches.

Ring-extinction model: species sit on a ring with uniform random fitness;
each step the minimum-fitness species and its two neighbours are replaced
with fresh uniform values. The minimum at replacement time self-organizes
below a stable threshold, and runs of consecutive sub-threshold steps form
the avalanches.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class AvalancheSeries:
    """Avalanche sizes, one entry per driving event (or threshold run)."""

    sizes: np.ndarray

    def positive(self) -> np.ndarray:
        """Sizes > 0, the subset usable by the power-law fitter."""
        return self.sizes[self.sizes > 0]


class _UniformBuffer:
    """Block-buffered uniform draws; one generator call per 2^16 values."""

    def __init__(self, rng: np.random.Generator, block: int = 1 << 16):
        self._rng = rng
        self._block = block
        self._values = rng.random(block)
        self._next = 0

    def draw(self) -> float:
        if self._next == self._block:
            self._values = self._rng.random(self._block)
            self._next = 0
        v = self._values[self._next]
        self._next += 1
        return v


@dataclass
class Sandpile1D:
    """Slope-variable sandpile on sites 0..n_sites-1; wall left, open right.

    stochastic_threshold=False recovers the constant-threshold textbook
    model (useful for studying its trivially stable profile); the default
    renews each toppled site's threshold within {z_c, z_c + 1}.
    """

    n_sites: int
    z_c: float
    rng: Optional[np.random.Generator] = None
    stochastic_threshold: bool = True
    slopes: np.ndarray = field(init=False)
    escaped_right: int = field(init=False, default=0)
    drives_at_wall: int = field(init=False, default=0)

    def __post_init__(self):
        if self.n_sites < 2:
            raise ConfigurationError(f"n_sites must be >= 2, got {self.n_sites}")
        if not self.z_c >= 1:
            raise ConfigurationError(f"z_c must be >= 1, got {self.z_c}")
        if self.rng is None:
            self.rng = np.random.default_rng(0)
        self.slopes = np.zeros(self.n_sites, dtype=np.int64)
        self._uniforms = _UniformBuffer(self.rng)
        if self.stochastic_threshold and np.isfinite(self.z_c):
            self._thresholds = [
                self.z_c + (self._uniforms.draw() < 0.5) for _ in range(self.n_sites)
            ]
        else:
            self._thresholds = [self.z_c] * self.n_sites

    def drive(self, site: int) -> None:
        """Add one grain at a site: slope up there, neighbour slope down."""
        self.slopes[site] += 1
        if site > 0:
            self.slopes[site - 1] -= 1
        else:
            self.drives_at_wall += 1

    def relax(self) -> int:
        """Topple until every slope is at or below its threshold; return topple count.

        A supercritical interior site sheds 2 slope units, one to each
        neighbour. In height terms a topple moves one grain one site to the
        right, so the open right edge sheds a single unit (the grain leaves
        the table) while the closed left wall keeps all sand in the system.
        The rule is abelian for fixed thresholds, and threshold renewal is
        keyed to topple events, so a simple worklist suffices.
        """
        z = self.slopes.tolist()
        thr = self._thresholds
        last = self.n_sites - 1
        stack = [s for s in range(self.n_sites) if z[s] > thr[s]]
        if not stack:
            return 0
        renew = self.stochastic_threshold and np.isfinite(self.z_c)
        topples = 0
        escaped = 0
        while stack:
            s = stack.pop()
            if z[s] <= thr[s]:
                continue
            topples += 1
            if s == last:
                z[s] -= 1
                escaped += 1
            else:
                z[s] -= 2
                z[s + 1] += 1
                if z[s + 1] > thr[s + 1]:
                    stack.append(s + 1)
            if s > 0:
                z[s - 1] += 1
                if z[s - 1] > thr[s - 1]:
                    stack.append(s - 1)
            if renew:
                thr[s] = self.z_c + (self._uniforms.draw() < 0.5)
            if z[s] > thr[s]:
                stack.append(s)
        self.slopes = np.asarray(z, dtype=np.int64)
        self.escaped_right += escaped
        return topples

    def total_slope(self) -> int:
        return int(self.slopes.sum())

    def total_grains(self) -> int:
        """Sand mass in height terms: sum of column heights.

        With h(n) = sum of slopes from n rightward, the mass telescopes to
        sum((i+1) * z[i]). Every drive adds exactly one grain; only
        right-edge topples remove one, so
        total_grains == n_drives - escaped_right at all times.
        """
        weights = np.arange(1, self.n_sites + 1, dtype=np.int64)
        return int(np.dot(weights, self.slopes))


def simulate_sandpile_1d(
    n_sites: int,
    z_c: float,
    n_grains: int,
    rng: np.random.Generator,
) -> AvalancheSeries:
    """Drive a fresh sandpile with n_grains random grains, recording topples.

    Each grain lands on a uniformly random site and the pile relaxes fully
    before the next grain; the avalanche size is the number of topple
    events the grain caused (0 when nothing moved).
    """
    pile = Sandpile1D(n_sites=n_sites, z_c=z_c, rng=rng)
    sizes = np.empty(n_grains, dtype=np.int64)
    sites = rng.integers(0, n_sites, size=n_grains)
    for g in range(n_grains):
        pile.drive(int(sites[g]))
        sizes[g] = pile.relax()
    return AvalancheSeries(sizes=sizes)


@dataclass
class BakSneppen:
    """Ring of species with extremal replacement dynamics."""

    n_species: int
    rng: np.random.Generator
    fitness: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n_species < 3:
            raise ConfigurationError(f"n_species must be >= 3, got {self.n_species}")
        self.fitness = self.rng.random(self.n_species)

    def step(self) -> float:
        """Replace the weakest species and its ring neighbours; return the old minimum."""
        i = int(np.argmin(self.fitness))
        current_min = float(self.fitness[i])
        fresh = self.rng.random(3)
        n = self.n_species
        self.fitness[i] = fresh[0]
        self.fitness[(i - 1) % n] = fresh[1]
        self.fitness[(i + 1) % n] = fresh[2]
        return current_min

    def run_minima(self, n_steps: int) -> np.ndarray:
        """Minimum fitness observed at each replacement over n_steps."""
        minima = np.empty(n_steps)
        for t in range(n_steps):
            minima[t] = self.step()
        return minima


def threshold_runs(minima: np.ndarray, threshold: float) -> np.ndarray:
    """Lengths of maximal consecutive runs with minima below the threshold."""
    below = minima < threshold
    if not below.any():
        return np.empty(0, dtype=np.int64)
    padded = np.concatenate([[False], below, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, ends = edges[::2], edges[1::2]
    return (ends - starts).astype(np.int64)


def estimate_bs_threshold(minima: np.ndarray, percentile: float = 95.0) -> float:
    """Emergent replacement-fitness ceiling from the recorded minima.

    In the organized state nearly every replacement happens below a stable
    value; a high percentile of the minima estimates it from below.
    """
    return float(np.percentile(minima, percentile))


def simulate_bak_sneppen(
    n_species: int,
    n_steps: int,
    rng: np.random.Generator,
    warmup: int | None = None,
) -> AvalancheSeries:
    """Run the ring model and extract threshold-run avalanches.

    The first `warmup` steps (a tenth of the budget by default, capped at
    10^4) only let the system organize; the threshold estimate and the runs
    both come from the remaining steps.
    """
    model = BakSneppen(n_species=n_species, rng=rng)
    if warmup is None:
        warmup = min(n_steps // 10, 10_000)
    if warmup:
        model.run_minima(warmup)
    minima = model.run_minima(n_steps - warmup)
    threshold = estimate_bs_threshold(minima)
    return AvalancheSeries(sizes=threshold_runs(minima, threshold))
