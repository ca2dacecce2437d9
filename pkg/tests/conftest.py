import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.hc.dendrogram import Dendrogram
from app.main import app


@pytest.fixture(scope="session")
def client():
    with TestClient(app) as c:
        yield c


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def caterpillar():
    """(0, 1) merge first, then 2 joins: T0 = {(0,1,2), (1,0,2)}."""
    return Dendrogram(3, [(0, 1), (3, 2)])


@pytest.fixture
def balanced():
    return Dendrogram(4, [(0, 1), (2, 3), (4, 5)])
