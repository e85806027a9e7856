"""Finite digraphs and their allowed-path structure.

Vertices are dense integer ids ``0..n_vertices-1``.  An elementary path of
dimension ``p`` is a tuple of ``p + 1`` vertex ids (repeats permitted); it is
*allowed* when every consecutive pair is a directed edge.  Every 0-path is
allowed.  Path enumeration is always in lexicographic order, which fixes the
basis order used by every operator in this package.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UNREACHABLE",
    "Digraph",
    "DigraphError",
    "DistanceTable",
    "curvature_bound",
    "degree",
    "digraph_from_dict",
    "enumerate_allowed",
    "graph_distance",
    "is_allowed",
    "parse_digraph",
]

# Sentinel hop count for disconnected pairs.  Never a "large number".
UNREACHABLE = -1


class DigraphError(ValueError):
    """Malformed digraph input or an out-of-range vertex id."""


@dataclass(frozen=True)
class Digraph:
    """Immutable directed graph on vertices ``0..n_vertices-1``.

    ``edges`` is kept as a sorted tuple so that equal digraphs hash equally
    and all derived enumerations are reproducible.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    allow_self_loops: bool = False

    def __post_init__(self):
        if self.n_vertices < 0:
            raise DigraphError("vertex count must be non-negative")
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise DigraphError(f"edge {e!r} is not a pair")
            u, v = e
            for x in (u, v):
                if not (0 <= x < self.n_vertices):
                    raise DigraphError(f"vertex id {x} out of range [0, {self.n_vertices})")
            if u == v and not self.allow_self_loops:
                raise DigraphError(f"self-loop ({u}, {v}) rejected (pass allow_self_loops=True to permit)")
            if e in seen:
                raise DigraphError(f"duplicate edge ({u}, {v})")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in _edge_set(self)

    def check_vertex(self, x: int) -> int:
        if not (0 <= x < self.n_vertices):
            raise DigraphError(f"vertex id {x} out of range [0, {self.n_vertices})")
        return x

    def relabel(self, perm: dict[int, int] | list[int]) -> "Digraph":
        """Digraph with vertex ``v`` renamed to ``perm[v]``."""
        if isinstance(perm, dict):
            mapping = perm
        else:
            mapping = {i: p for i, p in enumerate(perm)}
        edges = tuple((mapping[u], mapping[v]) for u, v in self.edges)
        return Digraph(self.n_vertices, edges, self.allow_self_loops)


@functools.lru_cache(maxsize=None)
def _edge_set(g: Digraph) -> frozenset:
    return frozenset(g.edges)


@functools.lru_cache(maxsize=None)
def _out_lists(g: Digraph) -> tuple[tuple[int, ...], ...]:
    out = [[] for _ in range(g.n_vertices)]
    for u, v in g.edges:
        out[u].append(v)
    return tuple(tuple(sorted(vs)) for vs in out)


@functools.lru_cache(maxsize=None)
def _undirected_neighbors(g: Digraph) -> tuple[tuple[int, ...], ...]:
    nbr = [set() for _ in range(g.n_vertices)]
    for u, v in g.edges:
        if u != v:
            nbr[u].add(v)
            nbr[v].add(u)
    return tuple(tuple(sorted(s)) for s in nbr)


def parse_digraph(text: str, allow_self_loops: bool = False) -> Digraph:
    """Parse the edge-list format.

    Lines are ``u v`` (ASCII decimal); ``#`` starts a comment line; an
    optional header ``vertices N`` fixes the vertex count, otherwise it is
    inferred as ``1 + max id``.
    """
    n_declared = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "vertices":
            if n_declared is not None:
                raise DigraphError(f"line {lineno}: duplicate 'vertices' header")
            if edges:
                raise DigraphError(f"line {lineno}: 'vertices' header must precede edges")
            if len(parts) != 2:
                raise DigraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n_declared = int(parts[1])
            except ValueError:
                raise DigraphError(f"line {lineno}: malformed header {line!r}") from None
            if n_declared < 0:
                raise DigraphError(f"line {lineno}: negative vertex count")
            continue
        if len(parts) != 2:
            raise DigraphError(f"line {lineno}: malformed edge line {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DigraphError(f"line {lineno}: malformed edge line {line!r}") from None
        if u < 0 or v < 0:
            raise DigraphError(f"line {lineno}: negative vertex id")
        edges.append((u, v))
    if n_declared is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    else:
        n = n_declared
    if len(set(edges)) != len(edges):
        dup = next(e for i, e in enumerate(edges) if e in edges[:i])
        raise DigraphError(f"duplicate edge {dup}")
    return Digraph(n, tuple(edges), allow_self_loops)


def digraph_from_dict(obj: dict, allow_self_loops: bool = False) -> Digraph:
    """Build a digraph from the structured form {"vertices": N, "edges": [[u, v], ...]}."""
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise DigraphError("expected an object with 'vertices' and 'edges' fields")
    try:
        n = int(obj["vertices"])
    except (TypeError, ValueError):
        raise DigraphError("'vertices' must be an integer") from None
    edges = []
    for e in obj["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise DigraphError(f"edge entry {e!r} is not a 2-array")
        edges.append((int(e[0]), int(e[1])))
    if len(set(edges)) != len(edges):
        dup = next(e for i, e in enumerate(edges) if e in edges[:i])
        raise DigraphError(f"duplicate edge {dup}")
    return Digraph(n, tuple(edges), allow_self_loops)


def is_allowed(g: Digraph, path: tuple[int, ...]) -> bool:
    """True iff every consecutive pair of ``path`` is an edge (0-paths: always)."""
    if len(path) == 0:
        raise DigraphError("a path must contain at least one vertex")
    for x in path:
        g.check_vertex(x)
    es = _edge_set(g)
    return all((path[k], path[k + 1]) in es for k in range(len(path) - 1))


@functools.lru_cache(maxsize=None)
def enumerate_allowed(g: Digraph, p: int) -> tuple[tuple[int, ...], ...]:
    """All allowed elementary p-paths, in lexicographic order."""
    if p < 0:
        raise ValueError("path dimension must be non-negative")
    if p == 0:
        return tuple((v,) for v in range(g.n_vertices))
    out = _out_lists(g)
    paths: list[tuple[int, ...]] = []

    def extend(prefix: list[int]):
        if len(prefix) == p + 1:
            paths.append(tuple(prefix))
            return
        for w in out[prefix[-1]]:
            prefix.append(w)
            extend(prefix)
            prefix.pop()

    for v in range(g.n_vertices):
        extend([v])
    return tuple(paths)


def degree(g: Digraph, x: int) -> int:
    """Number of distinct vertices adjacent to x in either direction (self excluded)."""
    g.check_vertex(x)
    return len(_undirected_neighbors(g)[x])


@dataclass(frozen=True)
class DistanceTable:
    """All-pairs hop counts over the symmetrized adjacency.

    ``hops[x, y]`` is the minimum number of undirected steps, or the
    UNREACHABLE sentinel for disconnected pairs.
    """

    hops: np.ndarray = field(repr=False)

    def dist(self, x: int, y: int) -> float:
        h = int(self.hops[x, y])
        return math.inf if h == UNREACHABLE else float(h)

    @property
    def is_connected(self) -> bool:
        return not np.any(self.hops == UNREACHABLE)

    def as_lists(self) -> list[list[int | None]]:
        """JSON-friendly form: disconnected pairs become null."""
        return [
            [None if h == UNREACHABLE else int(h) for h in row]
            for row in self.hops
        ]


def graph_distance(g: Digraph) -> DistanceTable:
    """BFS hop counts over the symmetrized adjacency."""
    n = g.n_vertices
    nbr = _undirected_neighbors(g)
    hops = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for s in range(n):
        hops[s, s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in nbr[x]:
                if hops[s, y] == UNREACHABLE:
                    hops[s, y] = hops[s, x] + 1
                    queue.append(y)
    return DistanceTable(hops)


def curvature_bound(g: Digraph, x0: int) -> float:
    """Least C >= 0 with (L rho)(x) >= -C for rho = dist(., x0).

    L is the vertex-level Laplacian (adjoint-built, degree-weighted); the
    digraph must be connected under symmetrized adjacency.
    """
    from .hodge import vertex_laplacian  # deferred: hodge imports this module

    g.check_vertex(x0)
    table = graph_distance(g)
    if not table.is_connected:
        raise DigraphError("curvature bound requires a connected digraph")
    rho = table.hops[:, x0].astype(np.float64)
    lap_rho = vertex_laplacian(g) @ rho
    return float(max(0.0, -lap_rho.min())) if lap_rho.size else 0.0
