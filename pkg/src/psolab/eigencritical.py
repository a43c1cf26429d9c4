"""Transform-based swarm step that pins the top eigenvalue at one.

Each iteration runs the standard update in full (velocities, personal and
global bests), estimates the particle-mixing matrix C carrying the
pre-step positions onto the stepped ones, rescales C so its top
eigenvalue modulus is exactly one, and overrides the positions with the
rescaled transform applied to the pre-step positions. Scalar blow-ups are
cancelled exactly (a uniform 2x growth normalizes back to the identity),
which is the divergence-suppression mechanism of this variant.

Velocities after the override are the displacement actually travelled
(X(t+1) - X(t)), keeping the state self-consistent; carrying the
un-transformed velocities instead lets the two channels drift apart by
hundreds of orders of magnitude and ends in float overflow within a few
thousand iterations.

A swarm whose configuration has contracted away to nothing carries no
information about an N x N mixing map: when the position scale falls
below DEGENERACY_RTOL of the stepped scale (or the estimate itself
degenerates), the standard step stands un-transformed for that iteration
and a warning is recorded. This is what lets the variant climb out of
its collapsed phases: left pinned in place it never re-expands, because
the collapse is a stable fixed point of the transform ratchet.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .core import PsoParams, SwarmConfig, SwarmRng, SwarmState, _commit_evaluation, _tentative_move
from .errors import SingularSpectrumError
from .numerics import eigenvalues, lstsq_transform, spectral_normalize

# Recheck tolerance for the committed transform's top eigenvalue modulus.
SPECTRAL_TOL = 1e-9

# Position-to-move scale ratio below which the configuration is treated
# as collapsed and the transform is skipped for the iteration.
DEGENERACY_RTOL = 1e-8


def step_eigencritical(
    state: SwarmState,
    params: PsoParams,
    config: SwarmConfig,
    objective: Callable,
    rng: SwarmRng,
) -> SwarmState:
    """One transform-normalized step; mutates and returns the state.

    Bests update from the standard step exactly as in the plain variant;
    only the position state is overridden afterwards. state.last_transform
    holds the committed mixing matrix for iterations where one was applied
    (None on degenerate fallbacks) and state.last_top_modulus its
    recomputed top eigenvalue modulus.
    """
    velocities, tentative = _tentative_move(state, params, config, rng)
    x_before = state.positions.copy()
    state = _commit_evaluation(state, tentative, velocities, objective, params)

    x_scale = float(np.abs(x_before).max())
    t_scale = float(np.abs(tentative).max())
    state.last_transform = None
    state.last_top_modulus = None
    if x_scale <= DEGENERACY_RTOL * t_scale:
        state.warnings.append(
            f"iteration {state.iteration}: collapsed configuration "
            f"(scale {x_scale:.3e} vs move {t_scale:.3e}); transform skipped"
        )
        return state
    try:
        fit = lstsq_transform(x_before, tentative)
        if not np.isfinite(fit.matrix).all():
            raise SingularSpectrumError("transform estimate overflowed")
        c = spectral_normalize(fit.matrix)
        committed = c @ x_before
        if not np.isfinite(committed).all():
            raise SingularSpectrumError("transformed positions overflowed")
    except SingularSpectrumError as exc:
        state.warnings.append(f"iteration {state.iteration}: {exc}; transform skipped")
        return state
    top = float(np.abs(eigenvalues(c)[0]))
    state.top_modulus_error_max = max(state.top_modulus_error_max, abs(top - 1.0))
    if abs(top - 1.0) > SPECTRAL_TOL:
        state.warnings.append(
            f"iteration {state.iteration}: committed transform top eigenvalue "
            f"modulus {top!r} off unit by more than {SPECTRAL_TOL}"
        )
    state.positions = committed
    state.velocities = committed - x_before
    state.last_transform = c
    state.last_top_modulus = top
    return state
