import hypothesis
import pytest

from skedfit import fixtures

hypothesis.settings.register_profile(
    "ci", max_examples=60, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("ci")


@pytest.fixture(scope="session")
def two_route():
    return fixtures.two_route_instance()


@pytest.fixture(scope="session")
def tiny():
    return fixtures.tiny_instance()
