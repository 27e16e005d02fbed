import random

import pytest
from hypothesis import settings

from locallim.graphcore import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_graph(n: int, p: float, seed: int) -> Graph:
    r = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if r.random() < p])


@pytest.fixture
def k4():
    return Graph.from_edges(4, [(a, b) for a in range(1, 5) for b in range(a + 1, 5)])


@pytest.fixture
def theta():
    # u=1, v=2 joined by paths of lengths 1, 2, 2 through 3 and 4
    return Graph.from_edges(4, [(1, 2), (1, 3), (3, 2), (1, 4), (4, 2)])
