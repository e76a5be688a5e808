import numpy as np
import pytest

import framekin as fk


@pytest.fixture(scope="session")
def minkowski():
    return fk.minkowski_metric()


@pytest.fixture(scope="session")
def friedmann_small():
    """Weak expansion with the standard drift momentum."""
    return fk.make_friedmann(1e-3, 0.1005)


@pytest.fixture(scope="session")
def friedmann_a03():
    return fk.make_friedmann(0.3)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)


def random_points(rng, n, t_range=(0.0, 2.0), x_range=(-1.0, 1.0)):
    pts = np.empty((n, 4))
    pts[:, 0] = rng.uniform(*t_range, n)
    pts[:, 1:] = rng.uniform(*x_range, (n, 3))
    return [tuple(p) for p in pts]
