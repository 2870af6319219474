import numpy as np
import pytest

from ybx.special import default_elliptic


@pytest.fixture(scope="session")
def eparams():
    return default_elliptic()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
