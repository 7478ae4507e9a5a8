import pytest

from calabilab import make_cp1_geometry, normalize_potential, round_profile


@pytest.fixture(scope="session")
def cp1():
    return make_cp1_geometry()


@pytest.fixture(scope="session")
def cp1_round(cp1):
    return round_profile(cp1)


@pytest.fixture(scope="session")
def cp1_phi(cp1):
    return normalize_potential(cp1)
