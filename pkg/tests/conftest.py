import pytest

from siegellab.siegel_lab import PairContext


@pytest.fixture(scope="session")
def pair58_200():
    """Pair (5, 8) with eta = delta/e and zeros of D to height 200."""
    return PairContext.build(5, 8, delta=0.1, T=200)


@pytest.fixture(scope="session")
def pair58_100():
    return PairContext.build(5, 8, delta=0.1, T=100)
