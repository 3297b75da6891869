import numpy as np
import pytest

from erasure_exponents.ensemble import bsc, validate


def ternary(a=0.2, b=0.3, p0_b=None):
    """Inputs A, B, C with P(A) = a; A is a fair coin, B and C are mirrored biased coins.

    ``p0_b`` overrides P(0|B) to break the mirror symmetry.
    """
    p0_b = b if p0_b is None else p0_b
    chan = [[0.5, 0.5], [p0_b, 1.0 - p0_b], [1.0 - b, b]]
    return validate([a, (1 - a) / 2, (1 - a) / 2], chan, name="ternary")


@pytest.fixture(scope="session")
def bsc01():
    return bsc(0.1)


@pytest.fixture(scope="session")
def tern():
    return ternary()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
