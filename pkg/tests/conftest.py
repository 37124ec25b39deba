import pytest

from memorais import TimeDefaults, default_ruleset


@pytest.fixture(scope="session")
def rules():
    return default_ruleset()


@pytest.fixture(scope="session")
def defaults():
    return TimeDefaults()
