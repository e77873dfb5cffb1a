import numpy as np
import pytest

from starsync import NetworkParams

#: Single seed for every randomized test in the suite.
SUITE_SEED = 20250808


@pytest.fixture
def rng():
    return np.random.default_rng(SUITE_SEED)


def uniform_params(n, k=1.0, g=1.0, mass=1.0, bath_rate=0.0, bath_temp=0.0):
    """Network with identical Hooke constants and couplings."""
    return NetworkParams(
        n=n,
        mass=mass,
        hooke=(k,) * (n + 1),
        couplings=(g,) * n,
        bath_rate=bath_rate,
        bath_temp=bath_temp,
    )


def random_params(rng, n=None, bath_rate=0.0, bath_temp=0.0):
    """Random stable network with strictly positive couplings."""
    if n is None:
        n = int(rng.integers(2, 7))
    hooke = tuple(rng.uniform(0.5, 5.0, n + 1))
    couplings = tuple(rng.uniform(0.2, 10.0, n))
    return NetworkParams(
        n=n,
        mass=float(rng.uniform(0.5, 2.0)),
        hooke=hooke,
        couplings=couplings,
        bath_rate=bath_rate,
        bath_temp=bath_temp,
    )


def fig1_params(g=2.0, bath_rate=0.0, bath_temp=0.0):
    """Three oscillators with k = (1, 0.2, 10) around a k = 1 hub."""
    return NetworkParams(
        n=3,
        mass=1.0,
        hooke=(1.0, 0.2, 10.0, 1.0),
        couplings=(g + 0.9, g + 1.0, g + 1.1),
        bath_rate=bath_rate,
        bath_temp=bath_temp,
    )


FIG1_OFFSETS = (0.9, 1.0, 1.1)
