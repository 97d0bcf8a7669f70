import pytest

from treeprofile import (OffspringDistribution, RngStream,
                         factorial_unrooted_weights, unrooted_model)


@pytest.fixture(scope="session")
def geometric():
    return OffspringDistribution.geometric(0.5)


@pytest.fixture(scope="session")
def binary():
    return OffspringDistribution.binomial2(0.5)


@pytest.fixture(scope="session")
def poisson():
    return OffspringDistribution.poisson(1.0)


@pytest.fixture(scope="session")
def factorial_model():
    return unrooted_model(factorial_unrooted_weights())


@pytest.fixture()
def rng():
    return RngStream(20240811, 0)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: full acceptance criteria")
