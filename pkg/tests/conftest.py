"""Shared fixtures: canonical polygons and a cheap sampled-polygon cache."""

import numpy as np
import pytest

from outerlab.geometry import derive_orbit_polygon, regular_star
from outerlab.lab import OrbitSampler, sample_orbit_polygon

_SQRT3 = np.sqrt(3.0)

# Equilateral triangle inscribed in the unit circle, apex up.  Its orbit
# carries the hand-checked period-6 seed used throughout the dynamics tests.
TRIANGLE_VERTICES = np.array(
    [[0.0, 1.0], [-_SQRT3 / 2.0, -0.5], [_SQRT3 / 2.0, -0.5]]
)

SQUARE_VERTICES = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


@pytest.fixture(scope="session")
def triangle():
    return derive_orbit_polygon(TRIANGLE_VERTICES)


@pytest.fixture(scope="session")
def square():
    return derive_orbit_polygon(SQUARE_VERTICES)


@pytest.fixture(scope="session")
def pentagram():
    return derive_orbit_polygon(regular_star(5, 2))


@pytest.fixture(scope="session")
def sampled():
    """Deterministic pool of locally convex polygons keyed by (n, m)."""

    pool = {}
    for n in range(3, 9):
        for m in range(1, (n - 1) // 2 + 1):
            sampler = OrbitSampler(n, m, seed=900 + 10 * n + m)
            pool[(n, m)] = [sample_orbit_polygon(sampler) for _ in range(20)]
    return pool
