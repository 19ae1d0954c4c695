import os

import pytest

from hyperdismantle.hypergraph import Hypernetwork


@pytest.fixture(scope="session")
def anyio_backend():
    return "asyncio"


def pytest_collection_modifyitems(config, items):
    if os.getenv("HYPERDISMANTLE_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set HYPERDISMANTLE_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def two_edges() -> Hypernetwork:
    """E = {{0, 1, 2}, {2, 3}}."""
    return Hypernetwork.from_hyperedges([[0, 1, 2], [2, 3]])


@pytest.fixture
def star() -> Hypernetwork:
    """Hub 0 joined to leaves 1..4 by size-2 hyperedges."""
    return Hypernetwork.from_hyperedges([[0, 1], [0, 2], [0, 3], [0, 4]])
