"""Swarm representation, initialization, and the standard update step.

The update follows the component-wise notation: fresh random vectors r1,
r2 in [0,1]^D are drawn per particle per iteration (one independent
uniform per dimension), giving the rotation-variant form with the better
exploratory properties.

    V <- omega*V + alpha1*r1*(P - X) + alpha2*r2*(G - X)
    X <- X + V

Randomness is organized as one independent, seedable substream per
particle index, so the particle count never perturbs the sequence any
single particle sees. A swarm is single-threaded; parallelism belongs to
whole runs, not steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, EvaluationError
from .objectives import ObjectiveId, get_objective


class InertiaSchedule(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"


class Variant(str, Enum):
    STANDARD = "standard"
    EIGENCRITICAL = "eigencritical"
    ADAPTIVE = "adaptive"


# Bounds enforced for values arriving from the CLI or the live service.
# Library-level construction only requires non-negative values, so the
# adaptive variant is free to drift parameters outside the UI range.
UI_ALPHA_MAX = 4.0
UI_OMEGA_MAX = 2.0


@dataclass(frozen=True)
class PsoParams:
    """The tunable triple (alpha1, alpha2, omega) plus the inertia schedule."""

    alpha1: float = 1.494
    alpha2: float = 1.494
    omega: float = 0.729
    omega_top: float = 0.8
    omega_bottom: float = 0.4
    inertia_schedule: InertiaSchedule = InertiaSchedule.CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "inertia_schedule", InertiaSchedule(self.inertia_schedule))
        for name in ("alpha1", "alpha2", "omega", "omega_top", "omega_bottom"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ConfigurationError(f"{name} must be finite and >= 0, got {v}")
        if (
            self.inertia_schedule == InertiaSchedule.LINEAR
            and self.omega_bottom > self.omega_top
        ):
            raise ConfigurationError(
                f"omega_bottom ({self.omega_bottom}) must not exceed "
                f"omega_top ({self.omega_top}) for the linear schedule"
            )

    def validate_ui_bounds(self) -> "PsoParams":
        """Enforce the interactive-range bounds alpha in [0,4], omega in [0,2]."""
        if not (0 <= self.alpha1 <= UI_ALPHA_MAX and 0 <= self.alpha2 <= UI_ALPHA_MAX):
            raise ConfigurationError("alpha1 and alpha2 must lie in [0, 4]")
        if not 0 <= self.omega <= UI_OMEGA_MAX:
            raise ConfigurationError("omega must lie in [0, 2]")
        return self

    def with_values(self, alpha1: float, alpha2: float, omega: float) -> "PsoParams":
        return replace(self, alpha1=alpha1, alpha2=alpha2, omega=omega)


@dataclass(frozen=True)
class SwarmConfig:
    """Run shape: swarm size, dimensionality, budget, and initial placement."""

    n_particles: int
    dims: int
    iterations: int
    boundary_radius: float
    objective: ObjectiveId
    variant: Variant = Variant.STANDARD
    seed: int = 0
    velocity_clamp: Optional[float] = None  # opt-in; default is no clamp

    def __post_init__(self):
        if self.n_particles < 2:
            raise ConfigurationError(
                f"n_particles must be >= 2 (pairwise metrics and the least-"
                f"squares transform need at least two), got {self.n_particles}"
            )
        if self.dims < 1:
            raise ConfigurationError(f"dims must be >= 1, got {self.dims}")
        if self.iterations < 0:
            raise ConfigurationError(f"iterations must be >= 0, got {self.iterations}")
        if not self.boundary_radius > 0:
            raise ConfigurationError(
                f"boundary_radius must be > 0, got {self.boundary_radius}"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "objective", ObjectiveId(self.objective))
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass
class Particle:
    """Per-particle view over the swarm arrays (shared memory, not copies)."""

    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float


class SwarmRng:
    """One independent generator per particle index, all derived from one seed.

    Substream i is seeded from (seed, spawn_key=(i,)), so the values
    particle i draws are identical no matter how many particles exist.
    """

    def __init__(self, seed: int, n_particles: int):
        self.seed = int(seed)
        self.streams = [
            np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(i,)))
            for i in range(n_particles)
        ]

    def attraction_factors(self, i: int, dims: int) -> np.ndarray:
        """Fresh (2, D) block of uniforms for particle i: rows are r1, r2."""
        return self.streams[i].random((2, dims))


@dataclass
class SwarmState:
    """Positions, velocities, bests, and the iteration counter for one swarm.

    Arrays are stacked particle-per-row. The global best is the minimum of
    the particle bests at all times and is non-increasing across steps.
    """

    positions: np.ndarray
    velocities: np.ndarray
    best_positions: np.ndarray
    best_fitness: np.ndarray
    global_best_position: np.ndarray
    global_best_fitness: float
    iteration: int
    current_params: PsoParams
    warnings: list = field(default_factory=list)
    # Set by the transform-based step: committed mixing matrix, the
    # recomputed top eigenvalue modulus of that committed matrix, and the
    # worst |modulus - 1| seen over the whole run.
    last_transform: Optional[np.ndarray] = None
    last_top_modulus: Optional[float] = None
    top_modulus_error_max: float = 0.0

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def dims(self) -> int:
        return self.positions.shape[1]

    @property
    def particles(self) -> list:
        return [
            Particle(
                position=self.positions[i],
                velocity=self.velocities[i],
                best_position=self.best_positions[i],
                best_fitness=float(self.best_fitness[i]),
            )
            for i in range(self.n_particles)
        ]

    def copy(self) -> "SwarmState":
        return SwarmState(
            positions=self.positions.copy(),
            velocities=self.velocities.copy(),
            best_positions=self.best_positions.copy(),
            best_fitness=self.best_fitness.copy(),
            global_best_position=self.global_best_position.copy(),
            global_best_fitness=self.global_best_fitness,
            iteration=self.iteration,
            current_params=self.current_params,
            warnings=list(self.warnings),
            last_transform=None if self.last_transform is None else self.last_transform.copy(),
            last_top_modulus=self.last_top_modulus,
            top_modulus_error_max=self.top_modulus_error_max,
        )


def make_rng(config: SwarmConfig) -> SwarmRng:
    return SwarmRng(config.seed, config.n_particles)


def _sample_in_ball(rng: np.random.Generator, dims: int, radius: float) -> np.ndarray:
    """Uniform point in the D-ball: Gaussian direction, radius B * u^(1/D).

    Rejection sampling is hopeless past a few dimensions; this form is
    exact for any D.
    """
    direction = rng.standard_normal(dims)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        return np.zeros(dims)
    u = rng.random()
    return direction * (radius * u ** (1.0 / dims) / norm)


def init_swarm(
    config: SwarmConfig,
    params: PsoParams,
    rng: Optional[SwarmRng] = None,
) -> SwarmState:
    """Place particles uniformly inside the boundary ball, velocities zero.

    Personal bests start at the initial positions; the global best is their
    minimum. Pass the same SwarmRng used for subsequent steps so init and
    stepping share each particle's substream; omitting it builds a fresh
    one from the config seed.
    """
    if rng is None:
        rng = make_rng(config)
    n, d = config.n_particles, config.dims
    objective = get_objective(config.objective)
    positions = np.empty((n, d))
    for i in range(n):
        positions[i] = _sample_in_ball(rng.streams[i], d, config.boundary_radius)
    fitness = np.asarray(objective(positions), dtype=float)
    if not np.all(np.isfinite(fitness)):
        bad = int(np.flatnonzero(~np.isfinite(fitness))[0])
        raise EvaluationError(bad, positions[bad].copy(), 0, float(fitness[bad]))
    best_idx = int(np.argmin(fitness))
    return SwarmState(
        positions=positions,
        velocities=np.zeros((n, d)),
        best_positions=positions.copy(),
        best_fitness=fitness.copy(),
        global_best_position=positions[best_idx].copy(),
        global_best_fitness=float(fitness[best_idx]),
        iteration=0,
        current_params=params,
    )


def omega_at(t: int, config: SwarmConfig, params: PsoParams) -> float:
    """Inertia in effect at iteration t under the configured schedule."""
    if params.inertia_schedule == InertiaSchedule.CONSTANT:
        return params.omega
    if config.iterations == 0:
        raise ConfigurationError("linear inertia schedule needs iterations > 0")
    frac = t / config.iterations
    return params.omega_top - frac * (params.omega_top - params.omega_bottom)


def _tentative_move(
    state: SwarmState,
    params: PsoParams,
    config: SwarmConfig,
    rng: SwarmRng,
):
    """New velocities and positions for one step, without committing them."""
    n, d = state.positions.shape
    omega = omega_at(state.iteration, config, params)
    r = np.empty((2, n, d))
    for i in range(n):
        r[:, i, :] = rng.attraction_factors(i, d)
    # overflow here is an expected runtime condition on unbounded
    # objectives; the evaluation step turns it into an EvaluationError
    with np.errstate(over="ignore", invalid="ignore"):
        velocities = (
            omega * state.velocities
            + params.alpha1 * r[0] * (state.best_positions - state.positions)
            + params.alpha2 * r[1] * (state.global_best_position - state.positions)
        )
        if config.velocity_clamp is not None:
            np.clip(velocities, -config.velocity_clamp, config.velocity_clamp, out=velocities)
        return velocities, state.positions + velocities


def _commit_evaluation(
    state: SwarmState,
    positions: np.ndarray,
    velocities: np.ndarray,
    objective: Callable,
    params: PsoParams,
) -> SwarmState:
    """Adopt new positions/velocities, update bests, advance the counter.

    Personal and global bests move only on strict improvement, which keeps
    plateaus from churning best positions and preserves determinism.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        fitness = np.asarray(objective(positions), dtype=float)
    if not np.all(np.isfinite(fitness)):
        bad = int(np.flatnonzero(~np.isfinite(fitness))[0])
        raise EvaluationError(
            bad, positions[bad].copy(), state.iteration + 1, float(fitness[bad])
        )
    state.positions = positions
    state.velocities = velocities
    improved = fitness < state.best_fitness
    if np.any(improved):
        state.best_positions[improved] = positions[improved]
        state.best_fitness[improved] = fitness[improved]
    best_idx = int(np.argmin(state.best_fitness))
    if state.best_fitness[best_idx] < state.global_best_fitness:
        state.global_best_fitness = float(state.best_fitness[best_idx])
        state.global_best_position = state.best_positions[best_idx].copy()
    state.iteration += 1
    state.current_params = params
    return state


def step_standard(
    state: SwarmState,
    params: PsoParams,
    config: SwarmConfig,
    objective: Callable,
    rng: SwarmRng,
) -> SwarmState:
    """One standard update: move every particle, then refresh the bests.

    All particles move against the same global-best snapshot; the global
    best is refreshed only after the whole swarm has moved. Mutates and
    returns the given state.
    """
    velocities, positions = _tentative_move(state, params, config, rng)
    return _commit_evaluation(state, positions, velocities, objective, params)
