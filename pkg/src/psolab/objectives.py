"""Benchmark objective functions.

All four objectives are minimization targets, pure, and accept either a
single D-vector or a stack of vectors (reduction happens over the last
axis, so an (N, D) array yields N fitness values).
"""
from __future__ import annotations

from enum import Enum
from typing import Callable

import numpy as np


class ObjectiveId(str, Enum):
    SPHERE = "sphere"
    RASTRIGIN = "rastrigin"
    GRIEWANK = "griewank"
    SCHWEFEL = "schwefel"


def sphere(x) -> float | np.ndarray:
    """Sum of squares; global minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def rastrigin(x) -> float | np.ndarray:
    """sum(x_i^2 - 10 cos(2 pi x_i) + 10); global minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def griewank(x) -> float | np.ndarray:
    """sum(x_i^2)/4000 - prod(cos(x_i / sqrt(i))) + 1 with 1-based i.

    Global minimum 0 at the origin. The sqrt index is 1-based; this is the
    classic off-by-one to watch for.
    """
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1, dtype=float)
    return (
        np.sum(x * x, axis=-1) / 4000.0
        - np.prod(np.cos(x / np.sqrt(i)), axis=-1)
        + 1.0
    )


def schwefel(x) -> float | np.ndarray:
    """sum(x_i sin(sqrt(|x_i|))); deceptive, minimum -418.9829 per dimension.

    The global minimum sits at x_i = -420.9687 in the orientation used here,
    far from the large flat valley around the origin. No domain clipping is
    applied.
    """
    x = np.asarray(x, dtype=float)
    return np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)


OBJECTIVES: dict[ObjectiveId, Callable] = {
    ObjectiveId.SPHERE: sphere,
    ObjectiveId.RASTRIGIN: rastrigin,
    ObjectiveId.GRIEWANK: griewank,
    ObjectiveId.SCHWEFEL: schwefel,
}


def get_objective(objective: ObjectiveId | str) -> Callable:
    """Resolve an objective id (enum or name string) to its function."""
    return OBJECTIVES[ObjectiveId(objective)]
