import numpy as np
import pytest

from quadricgon.exactlinalg import Field


@pytest.fixture
def field():
    return Field(65537)


@pytest.fixture
def qq():
    return Field(None)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
