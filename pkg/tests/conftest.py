import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hypdomain.domain import annulus_domain, disc_domain
from hypdomain.hypmetric import solve_density
from hypdomain.scenarios import symmetric_three_connected

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def disc():
    return disc_domain(1.0, 0.0)


@pytest.fixture(scope="session")
def disc_field(disc):
    return solve_density(disc, 0.01)


@pytest.fixture(scope="session")
def annulus():
    return annulus_domain(0.25, 1.0, basepoint=0.5)


@pytest.fixture(scope="session")
def annulus_field(annulus):
    return solve_density(annulus, 0.01)


@pytest.fixture(scope="session")
def three():
    return symmetric_three_connected()


@pytest.fixture(scope="session")
def three_field(three):
    return solve_density(three, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
