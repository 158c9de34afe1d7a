import numpy as np
import pytest


def fd_laplacian(fun, x, h):
    """Central-difference Laplacian of ``fun`` at the single point ``x``."""
    x = np.asarray(x, dtype=np.float64)
    dim = x.size
    steps = np.eye(dim) * h
    pts = np.vstack([x, x + steps, x - steps])
    vals = np.asarray(fun(pts))
    return (vals[1:].sum() - 2 * dim * vals[0]) / h ** 2, vals[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
