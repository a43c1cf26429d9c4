import numpy as np
import pytest

from psolab import PsoParams, SwarmConfig


def powerlaw_samples(alpha: float, xmin: float, n: int, seed: int) -> np.ndarray:
    """Inverse-transform sampler for the continuous power law.

    Independent of the fitting code on purpose: x = xmin * (1-u)^(-1/(alpha-1)).
    """
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return xmin * (1.0 - u) ** (-1.0 / (alpha - 1.0))


@pytest.fixture
def small_config():
    return SwarmConfig(
        n_particles=5,
        dims=4,
        iterations=50,
        boundary_radius=10.0,
        objective="sphere",
        seed=123,
    )


@pytest.fixture
def default_params():
    return PsoParams()
