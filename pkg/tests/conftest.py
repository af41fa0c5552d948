import pytest

from spanforest import RandomStream, corpus


@pytest.fixture
def rng():
    return RandomStream(seed=2024, stream_id=0)


@pytest.fixture(scope="session")
def small_graphs():
    return corpus()
