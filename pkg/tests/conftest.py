"""Shared fixtures: a desk-scale test instance with its oracle."""

import numpy as np
import pytest

from specdens import (
    dense_eigensolve,
    estimate_spectral_interval,
    generate_modified_laplacian_2d,
)


@pytest.fixture(scope="session")
def small_lap():
    """50-dim modified Laplacian with the default potential bumps."""
    return generate_modified_laplacian_2d(10, 5)


@pytest.fixture(scope="session")
def small_interval(small_lap):
    return estimate_spectral_interval(small_lap, seed=0)


@pytest.fixture(scope="session")
def small_spectrum(small_lap):
    return dense_eigensolve(small_lap)
