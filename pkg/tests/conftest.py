import time

import pytest

START = pytest.StashKey[float]()


def pytest_sessionstart(session):
    session.config.stash[START] = time.perf_counter()


def pytest_collection_modifyitems(config, items):
    # acceptance checks run last so the suite-runtime check sees every other test
    items.sort(key=lambda item: item.nodeid.startswith("tests/test_acceptance.py"))


@pytest.fixture
def suite_elapsed(request):
    """Seconds since the test session started."""
    return time.perf_counter() - request.config.stash[START]
