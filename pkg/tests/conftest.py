import numpy as np
import pytest

from g2deform.g2core import G2Structure


@pytest.fixture(scope="session")
def G():
    return G2Structure.model()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def E():
    return np.eye(7)
