"""Backward edge elimination over decomposable models.

Starting from the saturated model, each step tries every edge that lies in
exactly one maximal clique, fits the reduced model in closed form, and
deletes the edge whose removal is least significant, as long as its p-value
exceeds ``alpha``.

Each candidate is scored by the deviance difference between the reduced and
the current model (``G2(reduced) - G2(current)`` on ``df(reduced) - df(current)``
degrees of freedom). From the saturated model this is simply the reduced
model's own deviance.
"""
from dataclasses import dataclass, field

from gllm.fit import fit_decomposable
from gllm.model import (GeneratingClass, interaction_graph, is_decomposable,
                        model_from_graph)
from gllm.stats import chi2_sf, deviance_g2
from gllm.table import ContingencyTable

LEXICOGRAPHIC = "lexicographic"
REVERSE_LEXICOGRAPHIC = "reverse-lexicographic"
TIE_RULES = (LEXICOGRAPHIC, REVERSE_LEXICOGRAPHIC)


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class CandidateEvaluation:
    edge: tuple
    reduced_model: GeneratingClass
    df: int
    g2: float
    p: float
    model_df: int
    model_g2: float

    @property
    def label(self) -> str:
        return edge_label(self.edge)


@dataclass
class EliminationStep:
    model: GeneratingClass
    candidates: list
    chosen: tuple | None = None
    stop_reason: str | None = None


@dataclass
class EliminationTrace:
    steps: list = field(default_factory=list)
    final_model: GeneratingClass | None = None
    alpha: float = 0.05
    tie_rule: str = LEXICOGRAPHIC

    @property
    def deleted(self) -> list:
        return [s.chosen for s in self.steps if s.chosen is not None]


def edge_label(edge) -> str:
    u, v = edge
    return f"{u}{v}" if len(u) == 1 and len(v) == 1 else f"{u}-{v}"


def _require_decomposable(gc):
    if not is_decomposable(gc):
        raise SelectionError(f"model {gc} is not decomposable")


def deletable_edges(gc: GeneratingClass) -> list:
    """Edges contained in exactly one generator, in factor order."""
    _require_decomposable(gc)
    g = interaction_graph(gc)
    out = []
    for u, v in g.edges:
        holders = sum(1 for gen in gc.generators if u in gen and v in gen)
        if holders == 1:
            out.append((u, v))
    return out


def delete_edge(gc: GeneratingClass, edge) -> GeneratingClass:
    u, v = edge
    pair = {frozenset((a, b)) for a, b in deletable_edges(gc)}
    if frozenset((u, v)) not in pair:
        raise SelectionError(f"edge {u}-{v} is not deletable from {gc}")
    reduced = model_from_graph(interaction_graph(gc).without_edge(u, v)).canonical()
    return reduced


def evaluate_candidates(t: ContingencyTable, gc: GeneratingClass) -> list:
    """Score every deletable edge of ``gc`` against the current model."""
    current = fit_decomposable(t, gc)
    g2_current = deviance_g2(t, current.fitted)
    out = []
    for edge in deletable_edges(gc):
        reduced = delete_edge(gc, edge)
        fr = fit_decomposable(t, reduced)
        g2_model = deviance_g2(t, fr.fitted)
        g2 = max(g2_model - g2_current, 0.0)
        df = fr.df - current.df
        out.append(CandidateEvaluation(edge=edge, reduced_model=reduced, df=df, g2=g2,
                                       p=chi2_sf(g2, df), model_df=fr.df, model_g2=g2_model))
    return out


def _pick(candidates, tie_rule):
    best = max(c.p for c in candidates)
    tied = [c for c in candidates if c.p == best]
    return tied[0] if tie_rule == LEXICOGRAPHIC else tied[-1]


def backward_select(t: ContingencyTable, alpha: float = 0.05,
                    tie_rule: str = LEXICOGRAPHIC,
                    start: GeneratingClass | None = None) -> EliminationTrace:
    """Delete the weakest edge while its p-value exceeds ``alpha``."""
    if not 0.0 <= alpha <= 1.0:
        raise SelectionError("alpha must lie in [0, 1]")
    if tie_rule not in TIE_RULES:
        raise SelectionError(f"unknown tie rule {tie_rule!r}")
    model = GeneratingClass.saturated(t.names) if start is None else start.canonical()
    _require_decomposable(model)
    trace = EliminationTrace(alpha=alpha, tie_rule=tie_rule)
    while True:
        candidates = evaluate_candidates(t, model)
        step = EliminationStep(model=model, candidates=candidates)
        trace.steps.append(step)
        if not candidates:
            step.stop_reason = "no deletable edges"
            break
        best = _pick(candidates, tie_rule)
        if not best.p > alpha:
            step.stop_reason = f"largest p-value {best.p:.5f} does not exceed alpha {alpha:g}"
            break
        step.chosen = best.edge
        model = best.reduced_model
    trace.final_model = model
    return trace
