"""Hierarchical log-linear models as generating classes.

A model is given by its maximal interaction terms, e.g. ``[123][34]``; every
subset of a generator is implicitly in the model.
"""
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from gllm.graph import UndirectedGraph, is_chordal, maximal_cliques


class ModelError(ValueError):
    """Invalid model specification."""


def _names(factors) -> tuple:
    return tuple(f if isinstance(f, str) else f.name for f in factors)


class GeneratingClass:
    """A hierarchical model over ``factors`` with the given generators.

    Non-maximal generators are absorbed. Generators keep their first-seen
    order (this is the order of sufficient statistics); each generator is
    stored in factor order.
    """

    __slots__ = ("_factors", "_generators")

    def __init__(self, factors: Sequence, generators: Iterable[Iterable[str]]):
        factors = _names(factors)
        if len(set(factors)) != len(factors):
            raise ModelError("duplicate factor name")
        pos = {f: i for i, f in enumerate(factors)}
        sets = []
        for gen in generators:
            gen = frozenset(gen)
            if not gen:
                raise ModelError("empty generator")
            unknown = gen.difference(pos)
            if unknown:
                raise ModelError(f"unknown factor(s) {sorted(unknown)} in generator")
            if gen not in sets:
                sets.append(gen)
        if not sets:
            raise ModelError("a model needs at least one generator")
        maximal = [s for s in sets if not any(s < o for o in sets)]
        self._factors = factors
        self._generators = tuple(tuple(sorted(s, key=pos.__getitem__)) for s in maximal)

    @classmethod
    def saturated(cls, factors: Sequence) -> "GeneratingClass":
        names = _names(factors)
        return cls(names, [names])

    @property
    def factors(self) -> tuple:
        return self._factors

    @property
    def generators(self) -> tuple:
        """Generators as tuples of factor names in factor order."""
        return self._generators

    @property
    def generator_sets(self) -> frozenset:
        return frozenset(frozenset(g) for g in self._generators)

    def is_saturated(self) -> bool:
        return len(self._generators) == 1 and len(self._generators[0]) == len(self._factors)

    def canonical(self) -> "GeneratingClass":
        """Same model with generators sorted by factor position."""
        pos = {f: i for i, f in enumerate(self._factors)}
        gens = sorted(self._generators, key=lambda g: tuple(pos[f] for f in g))
        return GeneratingClass(self._factors, gens)

    def __eq__(self, other):
        if not isinstance(other, GeneratingClass):
            return NotImplemented
        return (set(self._factors) == set(other._factors)
                and self.generator_sets == other.generator_sets)

    def __hash__(self):
        return hash((frozenset(self._factors), self.generator_sets))

    def __str__(self):
        return render_model(self)

    def __repr__(self):
        return f"GeneratingClass({render_model(self)!r})"


@dataclass(frozen=True)
class TermSet:
    """Downward-closed set of interaction terms; the empty term is the grand mean."""

    terms: frozenset

    def __contains__(self, term):
        return frozenset(term) in self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def render_model(gc: GeneratingClass) -> str:
    short = all(len(f) == 1 for f in gc.factors)
    if short:
        return "".join("[" + "".join(g) + "]" for g in gc.generators)
    return "".join("[" + ",".join(g) + "]" for g in gc.generators)


_GROUP = re.compile(r"\[([^\[\]]*)\]")


def parse_model(text: str, factors: Sequence) -> GeneratingClass:
    """Parse ``[123][34]`` or ``[A,B][B,C]`` notation against known factors.

    The concatenated single-character form is only accepted when every factor
    name is a single character.
    """
    names = _names(factors)
    short = all(len(n) == 1 for n in names)
    stripped = re.sub(r"\s+", "", text)
    if not stripped:
        raise ModelError("empty model string")
    if _GROUP.sub("", stripped):
        raise ModelError(f"syntax error in model string {text!r}")
    generators = []
    for body in _GROUP.findall(stripped):
        if not body:
            raise ModelError("empty generator '[]'")
        if "," in body:
            parts = body.split(",")
            if any(not p for p in parts):
                raise ModelError(f"empty factor name in generator [{body}]")
        elif short:
            parts = list(body)
        else:
            parts = [body]
        for p in parts:
            if p not in names:
                raise ModelError(f"unknown factor {p!r}")
        if len(set(parts)) != len(parts):
            raise ModelError(f"repeated factor in generator [{body}]")
        generators.append(parts)
    return GeneratingClass(names, generators)


def infer_factors(text: str) -> tuple:
    """Factor names mentioned in a model string, in order of appearance."""
    stripped = re.sub(r"\s+", "", text)
    seen = []
    for body in _GROUP.findall(stripped):
        parts = body.split(",") if "," in body else list(body)
        for p in parts:
            if p and p not in seen:
                seen.append(p)
    return tuple(seen)


def hierarchical_closure(gc: GeneratingClass) -> TermSet:
    terms = {frozenset()}
    for gen in gc.generators:
        for r in range(1, len(gen) + 1):
            terms.update(frozenset(c) for c in itertools.combinations(gen, r))
    return TermSet(frozenset(terms))


def is_comprehensive(gc: GeneratingClass) -> bool:
    covered = set().union(*gc.generators)
    return covered == set(gc.factors)


def interaction_graph(gc: GeneratingClass) -> UndirectedGraph:
    edges = set()
    for gen in gc.generators:
        edges.update(itertools.combinations(gen, 2))
    return UndirectedGraph(gc.factors, edges)


def is_graphical(gc: GeneratingClass) -> bool:
    cliques = maximal_cliques(interaction_graph(gc))
    return frozenset(cliques) == gc.generator_sets


def is_decomposable(gc: GeneratingClass) -> bool:
    return is_graphical(gc) and is_chordal(interaction_graph(gc))[0]


def model_from_graph(g: UndirectedGraph) -> GeneratingClass:
    """The graphical model whose generators are the maximal cliques of ``g``."""
    return GeneratingClass(g.vertices, [g.sorted(c) for c in maximal_cliques(g)])


def classify(gc: GeneratingClass) -> dict:
    graphical = is_graphical(gc)
    return {
        "comprehensive": is_comprehensive(gc),
        "hierarchical": True,
        "graphical": graphical,
        "decomposable": graphical and is_chordal(interaction_graph(gc))[0],
        "saturated": gc.is_saturated(),
    }
