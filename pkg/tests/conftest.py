import pytest
from hypothesis import HealthCheck, settings

from grho.labelling import default_labelling

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def rho():
    return default_labelling()
