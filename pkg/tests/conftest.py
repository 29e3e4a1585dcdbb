"""Shared fixtures: grids and cached imaginary-time preparations."""

import numpy as np
import pytest

from sapsim import Grid1D, TrapConfiguration, prepare_ground_state


@pytest.fixture(scope="session")
def small_grid():
    """Single-trap workhorse grid, dx = 0.125."""
    return Grid1D(n_points=128, x_min=-8.0, x_max=8.0)


@pytest.fixture(scope="session")
def triple_grid():
    """Coarse triple-well grid for dynamics smoke tests, dx = 0.1875."""
    return Grid1D(n_points=128, x_min=-12.0, x_max=12.0)


@pytest.fixture(scope="session")
def single_trap():
    """All three parabolas at the origin: one harmonic trap."""
    return TrapConfiguration((0.0, 0.0, 0.0))


@pytest.fixture(scope="session")
def prepared():
    """Memoized prepare_ground_state, keyed by configuration."""
    cache = {}

    def factory(config, g, grid, occupancy="LL", **kwargs):
        key = (config, round(g, 12), grid, occupancy)
        if key not in cache:
            cache[key] = prepare_ground_state(config, g, grid, occupancy, **kwargs)
        return cache[key].copy()

    return factory


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
