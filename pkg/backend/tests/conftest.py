from __future__ import annotations

from typing import List

import pytest

from generators import (
    gen_barbell10,
    gen_big_barbell,
    gen_complete,
    gen_cycle,
    gen_path,
    gen_random_connected,
    gen_star,
    gen_wheel10,
)
from graph_core import Graph


@pytest.fixture
def star10() -> Graph:
    return gen_star(10)


@pytest.fixture
def barbell() -> Graph:
    return gen_barbell10()


@pytest.fixture
def big_barbell() -> Graph:
    return gen_big_barbell(12)


@pytest.fixture
def wheel() -> Graph:
    return gen_wheel10()


@pytest.fixture
def path5() -> Graph:
    return gen_path(5)


@pytest.fixture
def cycle8() -> Graph:
    return gen_cycle(8)


@pytest.fixture
def k4() -> Graph:
    return gen_complete(4)


def random_corpus(count: int, min_n: int = 5, max_n: int = 10, seed_offset: int = 0) -> List[Graph]:
    """Seeded connected graphs of mixed size and density."""
    graphs = []
    for i in range(count):
        seed = seed_offset + i
        n = min_n + seed % (max_n - min_n + 1)
        p = (0.15, 0.3, 0.5)[seed % 3]
        graphs.append(gen_random_connected(n, p, seed))
    return graphs


@pytest.fixture(scope="session")
def small_random_graphs() -> List[Graph]:
    return random_corpus(24)
