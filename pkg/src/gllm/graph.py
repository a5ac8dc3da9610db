"""Simple undirected graphs over factor names.

Vertex order is kept as given at construction and is used to break ties
deterministically (maximum-cardinality search, min-fill, clique listing).
"""
import itertools
from collections import deque
from typing import Iterable, Sequence

MAX_ISOMORPHISM_VERTICES = 8


class GraphError(ValueError):
    pass


class UndirectedGraph:
    """Graph without loops or multiple edges."""

    __slots__ = ("_vertices", "_adj", "_order")

    def __init__(self, vertices: Sequence[str], edges: Iterable = ()):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise GraphError("duplicate vertex")
        adj = {v: set() for v in vertices}
        for edge in edges:
            u, v = tuple(edge)
            if u == v:
                raise GraphError(f"loop at {u!r}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge {u!r}-{v!r} has an endpoint outside the vertex set")
            adj[u].add(v)
            adj[v].add(u)
        self._vertices = vertices
        self._adj = {v: frozenset(n) for v, n in adj.items()}
        self._order = {v: i for i, v in enumerate(vertices)}

    @classmethod
    def complete(cls, vertices: Sequence[str]) -> "UndirectedGraph":
        return cls(vertices, itertools.combinations(vertices, 2))

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> list:
        """Edges as vertex pairs, sorted by vertex order."""
        out = []
        for u, v in itertools.combinations(self._vertices, 2):
            if v in self._adj[u]:
                out.append((u, v))
        return out

    def neighbors(self, v) -> frozenset:
        return self._adj[v]

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def order_key(self, v) -> int:
        return self._order[v]

    def sorted(self, vs: Iterable) -> tuple:
        return tuple(sorted(vs, key=self._order.__getitem__))

    def without_edge(self, u, v) -> "UndirectedGraph":
        drop = frozenset((u, v))
        return UndirectedGraph(self._vertices, (e for e in self.edges if frozenset(e) != drop))

    def with_edges(self, extra: Iterable) -> "UndirectedGraph":
        return UndirectedGraph(self._vertices, list(self.edges) + list(extra))

    def subgraph(self, keep: Iterable) -> "UndirectedGraph":
        keep = set(keep)
        vs = [v for v in self._vertices if v in keep]
        return UndirectedGraph(vs, (e for e in self.edges if e[0] in keep and e[1] in keep))

    def render(self) -> str:
        """Sorted edge list, e.g. ``1-2 1-3 2-3``."""
        return " ".join(f"{u}-{v}" for u, v in self.edges)

    def _check(self, vs) -> set:
        vs = set(vs)
        unknown = vs.difference(self._adj)
        if unknown:
            raise GraphError(f"unknown vertex/vertices: {sorted(map(str, unknown))}")
        return vs

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return set(self._vertices) == set(other._vertices) and self._adj == other._adj

    def __hash__(self):
        return hash((frozenset(self._vertices), frozenset(frozenset(e) for e in self.edges)))

    def __repr__(self):
        return f"UndirectedGraph({list(self._vertices)}, {self.render()!r})"


def boundary(g: UndirectedGraph, a: Iterable) -> frozenset:
    """Vertices outside ``a`` adjacent to some vertex of ``a``."""
    a = g._check(a)
    out = set()
    for v in a:
        out.update(g.neighbors(v))
    return frozenset(out - a)


def maximal_cliques(g: UndirectedGraph) -> list:
    """All maximal cliques (Bron-Kerbosch with pivoting).

    Returned as frozensets, sorted by their vertex-order index tuples.
    Isolated vertices come back as singletons.
    """
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: (len(p & g.neighbors(u)), -g.order_key(u)))
        for v in g.sorted(p - g.neighbors(pivot)):
            nv = g.neighbors(v)
            expand(r | {v}, p & nv, x & nv)
            p = p - {v}
            x = x | {v}

    if g.vertices:
        expand(set(), set(g.vertices), set())
    return sorted(out, key=lambda c: tuple(sorted(g.order_key(v) for v in c)))


def max_cardinality_search(g: UndirectedGraph) -> list:
    """Visit order of maximum-cardinality search; ties go to earlier vertices."""
    weight = {v: 0 for v in g.vertices}
    visited = []
    remaining = list(g.vertices)
    while remaining:
        v = max(remaining, key=lambda u: (weight[u], -g.order_key(u)))
        remaining.remove(v)
        visited.append(v)
        for u in g.neighbors(v):
            if u in weight and u not in visited:
                weight[u] += 1
    return visited


def is_chordal(g: UndirectedGraph):
    """Chordality test by maximum-cardinality search plus the fill-in check.

    Returns ``(True, elimination_ordering)`` with a perfect elimination
    ordering, or ``(False, None)``.
    """
    order = max_cardinality_search(g)
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [u for u in g.neighbors(v) if pos[u] < pos[v]]
        if len(earlier) < 2:
            continue
        parent = max(earlier, key=pos.__getitem__)
        rest = set(earlier) - {parent}
        if not rest <= g.neighbors(parent):
            return False, None
    return True, list(reversed(order))


def separates(g: UndirectedGraph, a: Iterable, b: Iterable, c: Iterable) -> bool:
    """True iff every path from ``a`` to ``b`` passes through ``c``."""
    a, b, c = g._check(a), g._check(b), g._check(c)
    if not a or not b:
        raise GraphError("a and b must be nonempty")
    if a & b or a & c or b & c:
        raise GraphError("a, b and c must be pairwise disjoint")
    seen = set(a)
    queue = deque(a)
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u in c or u in seen:
                continue
            if u in b:
                return False
            seen.add(u)
            queue.append(u)
    return True


def triangulate(g: UndirectedGraph) -> UndirectedGraph:
    """Chordal supergraph by greedy minimum-fill elimination (not guaranteed minimum)."""
    if is_chordal(g)[0]:
        return g
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    fill = []
    remaining = list(g.vertices)

    def fill_cost(v):
        nb = list(adj[v])
        return sum(1 for x, y in itertools.combinations(nb, 2) if y not in adj[x])

    while remaining:
        v = min(remaining, key=lambda u: (fill_cost(u), g.order_key(u)))
        nb = g.sorted(adj[v])
        for x, y in itertools.combinations(nb, 2):
            if y not in adj[x]:
                adj[x].add(y)
                adj[y].add(x)
                fill.append((x, y))
        for u in nb:
            adj[u].discard(v)
        del adj[v]
        remaining.remove(v)
    return g.with_edges(fill)


def isomorphic(g1: UndirectedGraph, g2: UndirectedGraph) -> bool:
    """Brute-force isomorphism test, limited to small graphs."""
    n = len(g1.vertices)
    if max(n, len(g2.vertices)) > MAX_ISOMORPHISM_VERTICES:
        raise GraphError(f"isomorphism search limited to {MAX_ISOMORPHISM_VERTICES} vertices")
    if n != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    deg1 = sorted(len(g1.neighbors(v)) for v in g1.vertices)
    deg2 = sorted(len(g2.neighbors(v)) for v in g2.vertices)
    if deg1 != deg2:
        return False
    src = g1.vertices
    edges1 = [(src.index(u), src.index(v)) for u, v in g1.edges]
    for perm in itertools.permutations(g2.vertices):
        if all(len(g1.neighbors(src[i])) == len(g2.neighbors(perm[i])) for i in range(n)):
            if all(g2.has_edge(perm[i], perm[j]) for i, j in edges1):
                return True
    return False
