import pytest
from hypothesis import HealthCheck, settings

from lengthspec.spectrum import SubgroupDescriptor, build_table

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def full2000():
    return build_table(SubgroupDescriptor(), 2000)


@pytest.fixture(scope="session")
def full300(full2000):
    return full2000.restrict(300)
