import pytest
from hypothesis import settings

from crjet import catalog

settings.register_profile("crjet", deadline=None, max_examples=60)
settings.load_profile("crjet")


@pytest.fixture(scope="session")
def fixtures():
    return {name: catalog.manifold(name) for name in catalog.MANIFOLDS}


@pytest.fixture(scope="session")
def maps():
    return {name: catalog.formal_map(name) for name in catalog.MAPS}
