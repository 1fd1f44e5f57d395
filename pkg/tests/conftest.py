import pytest

from webprover import stdlib


@pytest.fixture(scope="session")
def shared_env():
    # one bootstrap for the whole run; tests receive private deep copies
    return stdlib.shared_env()


@pytest.fixture()
def fresh_shared_env():
    return stdlib.shared_env()
