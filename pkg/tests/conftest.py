import itertools

import numpy as np
import pytest

from pathlap import Digraph, parse_digraph


@pytest.fixture
def g1():
    """Single edge 0 -> 1."""
    return parse_digraph("0 1")


@pytest.fixture
def k2sym():
    """Bidirected edge."""
    return parse_digraph("0 1\n1 0")


@pytest.fixture
def t3():
    """Directed 3-cycle."""
    return parse_digraph("0 1\n1 2\n2 0")


@pytest.fixture
def tr():
    """Transitive triangle."""
    return parse_digraph("0 1\n1 2\n0 2")


@pytest.fixture
def brs():
    """Bi-route square: two directed routes 0 -> 3."""
    return parse_digraph("0 1\n0 2\n1 3\n2 3")


@pytest.fixture
def p3sym():
    """Bidirected path on three vertices."""
    return parse_digraph("0 1\n1 0\n1 2\n2 1")


@pytest.fixture
def k3sym():
    """Bidirected triangle."""
    return parse_digraph("0 1\n1 0\n1 2\n2 1\n0 2\n2 0")


@pytest.fixture
def empty3():
    """Three isolated vertices."""
    return parse_digraph("vertices 3")


@pytest.fixture
def two_k2sym():
    """Disjoint union of two bidirected edges."""
    return parse_digraph("0 1\n1 0\n2 3\n3 2")


@pytest.fixture
def c4():
    """Directed 4-cycle."""
    return parse_digraph("0 1\n1 2\n2 3\n3 0")


def random_digraph(rng: np.random.Generator, n: int, p_edge: float = 0.35) -> Digraph:
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p_edge:
                edges.append((u, v))
    return Digraph(n, tuple(edges))


def random_walk_digraph(rng: np.random.Generator, max_components: int = 2) -> Digraph:
    """Disjoint unions of directed cycles and bidirected paths, relabeled.

    These satisfy the walk hypotheses (every valence positive, parent count
    equal to valence) at dimensions 1 and 2; the validator re-checks anyway.
    """
    blocks = []
    total = 0
    for _ in range(int(rng.integers(1, max_components + 1))):
        kind = rng.integers(0, 2)
        if kind == 0:
            length = int(rng.integers(2, 6))
            edges = [(total + i, total + (i + 1) % length) for i in range(length)]
        else:
            length = int(rng.integers(2, 5))
            edges = []
            for i in range(length - 1):
                edges.append((total + i, total + i + 1))
                edges.append((total + i + 1, total + i))
        blocks.extend(edges)
        total += length
    perm = rng.permutation(total)
    edges = tuple((int(perm[u]), int(perm[v])) for u, v in blocks)
    return Digraph(total, edges)


def brute_force_allowed(g: Digraph, p: int) -> list[tuple[int, ...]]:
    """Independent enumeration oracle: filter the full product by edge checks."""
    es = set(g.edges)
    out = []
    for tup in itertools.product(range(g.n_vertices), repeat=p + 1):
        if all((tup[k], tup[k + 1]) in es for k in range(p)):
            out.append(tup)
    return out
