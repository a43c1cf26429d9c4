"""Self-adjusting swarm step: measure dynamics, squash, nudge the parameters.

One scalar metric summarizes whether the swarm is spreading or collapsing;
its squashed difference between consecutive iterations drives a small
parameter update each step. Positive differences (diverging) shrink the
parameters, negative ones (stagnating) grow them, steering the swarm
toward the regime between the two.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .core import PsoParams, SwarmConfig, SwarmRng, SwarmState, step_standard
from .errors import ConfigurationError


class MetricId(str, Enum):
    PARTICLE_DIST = "particle_dist"  # mean pairwise particle distance
    CENTROID_DIST = "centroid_dist"  # mean particle-to-centroid distance
    VEL_NORM = "vel_norm"            # mean velocity norm


class RuleId(str, Enum):
    DEPENDANT = "dependant"      # same absolute nudge for every parameter
    INDEPENDENT = "independent"  # nudge proportional to each parameter


@dataclass(frozen=True)
class AdaptiveConfig:
    """Adaptation knobs: step-size epsilon, metric choice, update rule.

    By default the raw metric difference is squashed (diff-then-squash).
    Squashing the metric before differencing sounds equivalent but is not:
    the differences then telescope, so the total parameter drift over any
    window is bounded by epsilon times the squash range and the rule can
    never track a long collapse. squash_before_diff=True selects that
    telescoped reading anyway, for replication studies.
    """

    epsilon: float = 0.1
    metric: MetricId = MetricId.VEL_NORM
    rule: RuleId = RuleId.DEPENDANT
    squash_before_diff: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        object.__setattr__(self, "metric", MetricId(self.metric))
        object.__setattr__(self, "rule", RuleId(self.rule))


@dataclass(frozen=True)
class MetricTrace:
    """Metric values straddling the latest step.

    Raw metric values in the default diff-then-squash mode; squashed
    values (each in [-1, 1]) when squash_before_diff is set.
    """

    previous: float
    current: float


def measure(metric: MetricId, state: SwarmState) -> float:
    """Evaluate one swarm-dynamics metric on the current state.

    A swarm blown past float range reports a saturated (huge but finite)
    value so that metric differences stay well defined while the run winds
    down.
    """
    if state.n_particles < 2:
        raise ConfigurationError("dynamics metrics need at least 2 particles")
    with np.errstate(over="ignore", invalid="ignore"):
        if metric == MetricId.PARTICLE_DIST:
            diffs = state.positions[:, None, :] - state.positions[None, :, :]
            dists = np.linalg.norm(diffs, axis=-1)
            iu = np.triu_indices(state.n_particles, k=1)
            value = float(dists[iu].mean())
        elif metric == MetricId.CENTROID_DIST:
            centroid = state.positions.mean(axis=0)
            value = float(np.linalg.norm(state.positions - centroid, axis=1).mean())
        elif metric == MetricId.VEL_NORM:
            value = float(np.linalg.norm(state.velocities, axis=1).mean())
        else:
            raise ConfigurationError(f"unknown metric {metric!r}")
    if not np.isfinite(value):
        return 1e300
    return value


def squash(x: float, boundary: float) -> float:
    """Map a raw metric into (-1, 1) with a stretched, odd sigmoid.

    With eta = boundary/2 this is 2*(sigmoid(x/eta) - 0.5), identically
    tanh(x/(2*eta)). Raw metric differences are unbounded; this bounds the
    rule's step size. The stretch ties sensitivity to the initial-placement
    ball radius, beyond which the swarm is not expected to roam.
    """
    if not boundary > 0:
        raise ConfigurationError(f"boundary must be > 0, got {boundary}")
    return float(np.tanh(x / boundary))


def apply_rule(rule: RuleId, params: PsoParams, delta_s: float, epsilon: float) -> PsoParams:
    """Nudge (alpha1, alpha2, omega) against the metric trend.

    Dependant subtracts epsilon*delta_s from every parameter; independent
    scales each parameter by (1 - epsilon*delta_s). Either way a growing
    metric (delta_s > 0) shrinks the parameters and a shrinking metric
    grows them. Parameters are clamped at zero from below; no upper clamp,
    drift is expected and observable in the trace.
    """
    if not 0.0 < epsilon < 1.0:
        raise ConfigurationError(f"epsilon must lie in (0, 1), got {epsilon}")
    step = epsilon * delta_s
    if rule == RuleId.DEPENDANT:
        new = [params.alpha1 - step, params.alpha2 - step, params.omega - step]
    elif rule == RuleId.INDEPENDENT:
        new = [
            params.alpha1 - step * params.alpha1,
            params.alpha2 - step * params.alpha2,
            params.omega - step * params.omega,
        ]
    else:
        raise ConfigurationError(f"unknown rule {rule!r}")
    a1, a2, w = (max(0.0, v) for v in new)
    return params.with_values(a1, a2, w)


def initial_metric_trace(
    state: SwarmState, config: SwarmConfig, adaptive: AdaptiveConfig
) -> MetricTrace:
    """Seed the trace from the pre-step swarm.

    The first step's difference then reflects the first move rather than an
    arbitrary zero baseline.
    """
    s0 = measure(adaptive.metric, state)
    if adaptive.squash_before_diff:
        s0 = squash(s0, config.boundary_radius)
    return MetricTrace(previous=s0, current=s0)


def step_adaptive(
    state: SwarmState,
    params: PsoParams,
    config: SwarmConfig,
    adaptive: AdaptiveConfig,
    objective: Callable,
    rng: SwarmRng,
    trace: MetricTrace,
):
    """One standard step plus the parameter update for the next iteration.

    Returns (state, next_params, shifted trace). The returned parameters
    take effect on the following call; the step just taken used the ones
    passed in.
    """
    state = step_standard(state, params, config, objective, rng)
    raw = measure(adaptive.metric, state)
    if adaptive.squash_before_diff:
        current = squash(raw, config.boundary_radius)
        delta_s = current - trace.current
    else:
        current = raw
        delta_s = squash(raw - trace.current, config.boundary_radius)
    next_params = apply_rule(adaptive.rule, params, delta_s, adaptive.epsilon)
    return state, next_params, MetricTrace(previous=trace.current, current=current)
