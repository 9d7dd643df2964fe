import math
from itertools import combinations

import pytest

from ftspanner.graphs import Graph, dist, generate


def small_random_graph(seed: int, n_max: int = 10, weighted: bool = True) -> Graph:
    """Small connected-ish random graph for oracle micro-instances."""
    from ftspanner.rng import substream

    rng = substream(seed, "micro")
    n = rng.randint(2, n_max)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    if not pairs and n >= 2:
        pairs = [(0, 1)]
    edges = [(u, v, rng.randint(1, 8) if weighted else 1) for u, v in pairs]
    return Graph(n, edges)


def protected_direct(h: Graph, u: int, v: int, w: int, f: int, i: int) -> bool:
    """Definition-unrolled protection check: literally every fault set of
    every size up to f, distances via the graph-core dist. Kept naive on
    purpose; the verifier's pruned enumeration is compared against it."""
    bound = (2 * i - 1) * w
    others = [x for x in range(h.n) if x != u and x != v]
    for size in range(0, f + 1):
        if size > len(others):
            break
        for fault in combinations(others, size):
            if dist(h, u, v, fault) > bound:
                return False
    return True


@pytest.fixture(scope="session")
def triangle() -> Graph:
    return Graph(3, [(0, 1, 1), (1, 2, 2), (0, 2, 4)])


@pytest.fixture(scope="session")
def gnp30() -> Graph:
    return generate("gnp", n=30, p=0.4, seed=7)


@pytest.fixture(scope="session")
def dense34() -> Graph:
    return generate("gnp", n=34, p=0.5, seed=11)
