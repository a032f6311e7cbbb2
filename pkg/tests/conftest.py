import numpy as np
import pytest

from oimsim.rng import RandomStream


@pytest.fixture
def rng():
    return RandomStream(20240611)


def crandn(gen, *shape):
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2)
