"""Conditional independence: reading it off graphs and checking it by enumeration.

Everything here is brute force over explicit joint probability arrays and is
meant for small verification problems (a handful of factors).
"""
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from gllm.fit import clique_tree
from gllm.graph import UndirectedGraph, boundary, maximal_cliques, separates
from gllm.model import GeneratingClass, interaction_graph, is_decomposable, is_graphical
from gllm.table import FactorSpec

MAX_CELLS = 10**6
MAX_GLOBAL_VERTICES = 5
DEFAULT_CI_TOL = 1e-9


class MarkovError(ValueError):
    pass


class JointDistribution:
    """Probability array with one axis per factor, summing to one."""

    def __init__(self, factors: Sequence[FactorSpec], probs):
        self.factors = tuple(factors)
        self.names = tuple(f.name for f in self.factors)
        shape = tuple(f.size for f in self.factors)
        p = np.array(probs, dtype=np.float64).reshape(shape)
        if np.any(p < 0):
            raise MarkovError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise MarkovError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        self.probs = p

    @classmethod
    def uniform(cls, factors: Sequence[FactorSpec]) -> "JointDistribution":
        shape = tuple(f.size for f in factors)
        return cls(factors, np.full(shape, 1.0 / np.prod(shape)))

    @classmethod
    def from_weights(cls, factors, weights) -> "JointDistribution":
        w = np.asarray(weights, dtype=np.float64)
        return cls(factors, w / w.sum())

    def axes(self, names: Iterable[str]) -> tuple:
        try:
            return tuple(self.names.index(n) for n in names)
        except ValueError:
            raise MarkovError(f"unknown factor among {sorted(names)}") from None

    def margin(self, keep: Iterable[str]) -> np.ndarray:
        """Marginal probabilities over ``keep``, full rank with size-1 summed axes."""
        keep = set(keep)
        self.axes(keep)
        drop = tuple(i for i, n in enumerate(self.names) if n not in keep)
        return self.probs.sum(axis=drop, keepdims=True)


@dataclass
class CliquePotentialSet:
    """One strictly positive potential table per maximal clique of ``graph``.

    Potential arrays have one axis per clique member, in graph vertex order.
    """

    graph: UndirectedGraph
    potentials: Mapping

    def __post_init__(self):
        cliques = set(maximal_cliques(self.graph))
        given = {frozenset(k) for k in self.potentials}
        if given != cliques:
            raise MarkovError("potentials must be given for exactly the maximal cliques")
        for k, table in self.potentials.items():
            if np.any(np.asarray(table) <= 0):
                raise MarkovError(f"potential for clique {sorted(k)} is not strictly positive")


def random_potentials(g: UndirectedGraph, factors: Sequence[FactorSpec], rng,
                      low: float = 0.1, high: float = 2.0) -> CliquePotentialSet:
    sizes = {f.name: f.size for f in factors}
    pots = {}
    for clique in maximal_cliques(g):
        members = g.sorted(clique)
        pots[clique] = rng.uniform(low, high, size=tuple(sizes[v] for v in members))
    return CliquePotentialSet(g, pots)


def distribution_from_potentials(ps: CliquePotentialSet,
                                 factors: Sequence[FactorSpec]) -> JointDistribution:
    """P(x) = prod over cliques of psi(x restricted to the clique), normalized."""
    factors = tuple(factors)
    names = [f.name for f in factors]
    if set(names) != set(ps.graph.vertices):
        raise MarkovError("factors and graph vertices differ")
    shape = tuple(f.size for f in factors)
    if int(np.prod(shape)) > MAX_CELLS:
        raise MarkovError(f"joint table larger than {MAX_CELLS} cells")
    joint = np.ones(shape)
    for clique, table in ps.potentials.items():
        members = ps.graph.sorted(clique)
        table = np.asarray(table, dtype=np.float64)
        # reorder clique axes to factor order, then broadcast
        order = sorted(range(len(members)), key=lambda i: names.index(members[i]))
        table = np.transpose(table, order)
        bshape = [f.size if f.name in clique else 1 for f in factors]
        joint = joint * table.reshape(bshape)
    z = joint.sum()
    if z <= 0:
        raise MarkovError("potentials multiply to zero everywhere")
    return JointDistribution(factors, joint / z)


def ci_holds(d: JointDistribution, a, b, c=(), tol: float = DEFAULT_CI_TOL) -> bool:
    """Check A independent of B given C on every slice with P(C) > tol."""
    a, b, c = set(a), set(b), set(c)
    if not a or not b:
        raise MarkovError("a and b must be nonempty")
    if a & b or a & c or b & c:
        raise MarkovError("a, b and c must be pairwise disjoint")
    p_abc = d.margin(a | b | c)
    p_ac = d.margin(a | c)
    p_bc = d.margin(b | c)
    p_c = d.margin(c)
    live = np.broadcast_to(p_c > tol, p_abc.shape)
    safe = np.where(p_c > tol, p_c, 1.0)
    gap = np.abs(p_abc / safe - (p_ac / safe) * (p_bc / safe))
    return bool(np.all(gap[live] <= tol))


@dataclass(frozen=True)
class MarkovReport:
    pairwise: bool
    local: bool
    global_: bool

    def as_dict(self) -> dict:
        return {"pairwise": self.pairwise, "local": self.local, "global": self.global_}


def pairwise_statements(g: UndirectedGraph) -> list:
    vs = set(g.vertices)
    out = []
    for u, v in itertools.combinations(g.vertices, 2):
        if not g.has_edge(u, v):
            out.append(({u}, {v}, vs - {u, v}))
    return out


def local_statements(g: UndirectedGraph) -> list:
    vs = set(g.vertices)
    out = []
    for v in g.vertices:
        bd = set(boundary(g, {v}))
        rest = vs - bd - {v}
        if rest:
            out.append(({v}, rest, bd))
    return out


def global_statements(g: UndirectedGraph) -> list:
    """Every (A, B, C) with C separating A from B; A/B symmetric pairs listed once."""
    vs = g.vertices
    if len(vs) > MAX_GLOBAL_VERTICES:
        raise MarkovError(f"global check limited to {MAX_GLOBAL_VERTICES} vertices")
    out = []
    for labels in itertools.product(range(4), repeat=len(vs)):
        a = {v for v, k in zip(vs, labels) if k == 1}
        b = {v for v, k in zip(vs, labels) if k == 2}
        c = {v for v, k in zip(vs, labels) if k == 3}
        if not a or not b:
            continue
        if min(g.order_key(v) for v in a) > min(g.order_key(v) for v in b):
            continue
        if separates(g, a, b, c):
            out.append((a, b, c))
    return out


def check_markov_properties(d: JointDistribution, g: UndirectedGraph,
                            tol: float = DEFAULT_CI_TOL) -> MarkovReport:
    if set(d.names) != set(g.vertices):
        raise MarkovError("distribution factors and graph vertices differ")

    def all_hold(statements):
        return all(ci_holds(d, a, b, c, tol) for a, b, c in statements)

    return MarkovReport(
        pairwise=all_hold(pairwise_statements(g)),
        local=all_hold(local_statements(g)),
        global_=all_hold(global_statements(g)),
    )


@dataclass(frozen=True)
class CIStatement:
    a: frozenset
    b: frozenset
    c: frozenset

    def render(self, order: Sequence[str] = ()) -> str:
        pos = {v: i for i, v in enumerate(order)}

        def fmt(s):
            return "{" + ",".join(sorted(s, key=lambda v: (pos.get(v, len(pos)), v))) + "}"

        return f"{fmt(self.a)} ⊥ {fmt(self.b)} | {fmt(self.c)}"

    def key(self):
        return frozenset((self.a, self.b)), self.c


def implied_independences(gc: GeneratingClass) -> list:
    """CI statements readable from the interaction graph of a graphical model.

    One statement per non-adjacent pair (u, v): u and v independent given the
    boundary of u minus v. For decomposable models the clique/separator
    statements of a running-intersection ordering follow.
    """
    if not is_graphical(gc):
        raise MarkovError(f"model {gc} is not graphical")
    g = interaction_graph(gc)
    out = []
    seen = set()

    def add(a, b, c):
        st = CIStatement(frozenset(a), frozenset(b), frozenset(c))
        if st.key() not in seen:
            seen.add(st.key())
            out.append(st)

    for u, v in itertools.combinations(g.vertices, 2):
        if not g.has_edge(u, v):
            add({u}, {v}, boundary(g, {u}) - {v})
    if is_decomposable(gc):
        tree = clique_tree(gc)
        before = set()
        for clique, sep in zip(tree.cliques, tree.separators):
            left = clique - sep
            right = before - sep
            if left and right:
                add(left, right, sep)
            before |= clique
    return out
