import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_interior(rng, n, margin=0.01):
    """Random simplex points with all components at least ``margin``."""
    raw = rng.dirichlet((1.0, 1.0, 1.0), size=n)
    return (1.0 - 3.0 * margin) * raw + margin


def fd_gradient(f, x, y, h=1e-6):
    """Central finite differences of a scalar function of two variables."""
    gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h)
    gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h)
    return np.array([gx, gy])
