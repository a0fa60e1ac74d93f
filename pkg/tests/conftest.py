import pytest
from hypothesis import HealthCheck, settings

from nilmodel import cutproject as cp

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def h3_scheme():
    return cp.build_scheme("h3", 2, (1, 1, 2))


@pytest.fixture(scope="session")
def h3_window():
    return cp.Window.parse("2,2,4")


@pytest.fixture(scope="session")
def h3_patch(h3_scheme, h3_window):
    return cp.enumerate_model_set(h3_scheme, h3_window, 20)


@pytest.fixture(scope="session")
def line_scheme():
    # Z[sqrt 2] in one dimension
    from nilmodel import liealg

    return cp.build_scheme(liealg.abelian(1), 2, (1,))
