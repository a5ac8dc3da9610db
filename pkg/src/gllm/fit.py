"""Maximum-likelihood fitting of expected cell counts.

Decomposable models are fitted in closed form from clique and separator
margins; everything else goes through iterative proportional fitting.
"""
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from gllm import kernels
from gllm.graph import max_cardinality_search
from gllm.model import (GeneratingClass, hierarchical_closure, interaction_graph,
                        is_decomposable)
from gllm.table import ContingencyTable, marginalize

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 1000

CLOSED_FORM = "closed-form"
IPF = "ipf"


class FitError(RuntimeError):
    """The requested fit is undefined for this model or data."""


class NotDecomposableError(FitError, ValueError):
    pass


@dataclass(frozen=True)
class CliqueTree:
    """Cliques in running-intersection order with their separators.

    ``separators[i]`` is the intersection of ``cliques[i]`` with the union of
    all earlier cliques; ``separators[0]`` is always empty.
    """

    cliques: tuple
    separators: tuple

    def __post_init__(self):
        seen = set()
        for i, (c, s) in enumerate(zip(self.cliques, self.separators)):
            if s != c & seen:
                raise FitError(f"separator {i} is not the intersection with earlier cliques")
            if i and not any(s <= prev for prev in self.cliques[:i]):
                raise FitError("clique order violates the running intersection property")
            seen |= c


@dataclass
class FitResult:
    model: GeneratingClass
    fitted: ContingencyTable
    method: str
    iterations: int
    max_margin_deviation: float
    df: int
    converged: bool = True
    # stopping tolerance for IPF; rounding allowance 1e-9*N for closed form
    tol: float = field(default=0.0)


def clique_tree(gc: GeneratingClass) -> CliqueTree:
    """Order the generators of a decomposable model so they have RIP."""
    if not is_decomposable(gc):
        raise NotDecomposableError(f"model {gc} is not decomposable")
    order = max_cardinality_search(interaction_graph(gc))
    pos = {v: i for i, v in enumerate(order)}
    cliques = sorted((frozenset(g) for g in gc.generators),
                     key=lambda c: (max(pos[v] for v in c), min(pos[v] for v in c)))
    seps = []
    seen = set()
    for c in cliques:
        seps.append(frozenset(c & seen))
        seen |= c
    return CliqueTree(tuple(cliques), tuple(seps))


def _check_factors(t: ContingencyTable, gc: GeneratingClass, exact: bool):
    extra = set(gc.factors) - set(t.names)
    if extra:
        raise ValueError(f"model factors {sorted(extra)} not in table")
    if exact and set(gc.factors) != set(t.names):
        raise ValueError("model and table must have the same factors")


def _keepdims_margin(counts: np.ndarray, names: tuple, keep) -> np.ndarray:
    drop = tuple(i for i, n in enumerate(names) if n not in keep)
    return counts.sum(axis=drop, keepdims=True)


def sufficient_statistics(t: ContingencyTable, gc: GeneratingClass) -> list:
    """One observed marginal table per generator, in generator order."""
    _check_factors(t, gc, exact=False)
    return [marginalize(t, gen) for gen in gc.generators]


def degrees_of_freedom(gc: GeneratingClass, factors) -> int:
    """Residual df: cell count minus the number of free log-linear parameters.

    ``factors`` may be a ContingencyTable, a sequence of FactorSpec, or a
    mapping from factor name to number of levels.
    """
    if isinstance(factors, ContingencyTable):
        factors = factors.factors
    if isinstance(factors, dict):
        levels = dict(factors)
    else:
        levels = {f.name: f.size for f in factors}
    cells = math.prod(levels[n] for n in gc.factors)
    params = sum(math.prod(levels[f] - 1 for f in term)
                 for term in hierarchical_closure(gc))
    return cells - params


def _max_deviation(fitted: np.ndarray, observed: np.ndarray, names, gc) -> float:
    dev = 0.0
    for gen in gc.generators:
        a = _keepdims_margin(fitted, names, gen)
        b = _keepdims_margin(observed, names, gen)
        dev = max(dev, float(np.max(np.abs(a - b))))
    return dev


def fit_decomposable(t: ContingencyTable, gc: GeneratingClass) -> FitResult:
    """Closed-form MLE: product of clique margins over product of separator margins."""
    _check_factors(t, gc, exact=True)
    tree = clique_tree(gc)
    counts = t.counts
    names = t.names
    num = np.ones(counts.shape)
    den = np.ones(counts.shape)
    for c in tree.cliques:
        num = num * _keepdims_margin(counts, names, c)
    for s in tree.separators[1:]:
        den = den * _keepdims_margin(counts, names, s)
    zero = den == 0
    if np.any(zero & (num != 0)):
        raise FitError("zero separator margin with a nonzero clique product")
    fitted = np.zeros(counts.shape)
    np.divide(num, den, out=fitted, where=~zero)
    return FitResult(
        model=gc,
        fitted=t.with_counts(fitted),
        method=CLOSED_FORM,
        iterations=0,
        max_margin_deviation=_max_deviation(fitted, counts, names, gc),
        df=degrees_of_freedom(gc, t),
        tol=1e-9 * max(t.total, 1.0),
    )


def _flat_index(shape: tuple, axes: tuple) -> tuple:
    """Map every flat cell to the flat index of its margin over ``axes``."""
    if not axes:
        return np.zeros(int(np.prod(shape)), dtype=np.intp), 1
    grids = np.indices(shape).reshape(len(shape), -1)
    sub = tuple(grids[a] for a in axes)
    mshape = tuple(shape[a] for a in axes)
    return np.ravel_multi_index(sub, mshape).astype(np.intp), int(np.prod(mshape))


def fit_ipf(t: ContingencyTable, gc: GeneratingClass, tol: float = DEFAULT_TOL,
            max_iter: int = DEFAULT_MAX_ITER) -> FitResult:
    """Iterative proportional fitting from the all-ones table.

    Stops when the largest absolute deviation between fitted and observed
    generator margins is <= ``tol``. If ``max_iter`` cycles pass first, the
    partial fit is returned with ``converged=False``.
    """
    _check_factors(t, gc, exact=True)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    counts = t.counts
    flat_counts = np.ascontiguousarray(counts, dtype=np.float64).ravel()
    index_maps, observed = [], []
    for gen in gc.generators:
        idx, size = _flat_index(counts.shape, t.axes(gen))
        obs = kernels.margin_sums(flat_counts, idx, size)
        if np.any(obs <= 0):
            raise FitError(f"observed margin for generator {''.join(gen)} has a zero entry")
        index_maps.append(idx)
        observed.append(obs)
    fitted = np.ones(flat_counts.shape[0], dtype=np.float64)
    cycles, deviation = kernels.ipf_loop(fitted, index_maps, observed, float(tol), int(max_iter))
    return FitResult(
        model=gc,
        fitted=t.with_counts(fitted.reshape(counts.shape)),
        method=IPF,
        iterations=int(cycles),
        max_margin_deviation=float(deviation),
        df=degrees_of_freedom(gc, t),
        converged=bool(deviation <= tol),
        tol=float(tol),
    )


def fit(t: ContingencyTable, gc: GeneratingClass, tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER) -> FitResult:
    """Closed form when the model is decomposable, IPF otherwise."""
    if is_decomposable(gc):
        return fit_decomposable(t, gc)
    return fit_ipf(t, gc, tol=tol, max_iter=max_iter)


def birch_check(fr: FitResult, t: ContingencyTable) -> float:
    """Largest absolute gap between fitted and observed generator margins."""
    _check_factors(t, fr.model, exact=True)
    fitted = fr.fitted
    if fitted.names != t.names:
        raise ValueError("fitted and observed tables have different factor order")
    return _max_deviation(fitted.counts, t.counts, t.names, fr.model)


def _dot_letters(n: int) -> str:
    if n <= 3:
        return "ijk"[:n]
    return "hijklmnopqrstuvwxyzabcdefg"[:n]


def render_factorization(gc: GeneratingClass, style: str = "margin") -> str:
    """Closed-form estimate as text.

    ``style="margin"`` names margins by their factors, e.g.
    ``n(123) * n(134) / n(13)``; ``style="dot"`` uses dot notation in factor
    order, e.g. ``n[hij.] * n[h.jk] / n[h.j.]``.
    """
    tree = clique_tree(gc)
    factors = gc.factors
    short = all(len(f) == 1 for f in factors)
    letters = _dot_letters(len(factors))

    def term(s):
        if style == "dot":
            return "n[" + "".join(letters[i] if f in s else "." for i, f in enumerate(factors)) + "]"
        inside = [f for f in factors if f in s]
        return "n(" + ("" if short else ",").join(inside) + ")"

    if style not in ("margin", "dot"):
        raise ValueError(f"unknown style {style!r}")
    numerator = " * ".join(term(c) for c in tree.cliques)
    seps = Counter()
    order = []
    for s in tree.separators[1:]:
        key = term(s)
        if key not in seps:
            order.append(key)
        seps[key] += 1
    if not order:
        return numerator
    parts = [k if seps[k] == 1 else f"{k}^{seps[k]}" for k in order]
    denominator = parts[0] if len(parts) == 1 else "(" + " * ".join(parts) + ")"
    return f"{numerator} / {denominator}"
