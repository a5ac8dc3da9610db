import numpy as np
import pytest

from gllm import datasets
from gllm.graph import UndirectedGraph
from gllm.table import FactorSpec, from_records


def graph(spec: str, vertices: str | None = None) -> UndirectedGraph:
    """Build a graph from ``"12 13 23"``-style edge strings over single-char vertices."""
    edges = [tuple(e) for e in spec.split()]
    if vertices is None:
        vertices = sorted({v for e in edges for v in e})
    return UndirectedGraph(list(vertices), edges)


TWO_TRIANGLES = "12 13 14 23 34"
TRIANGLE_TAIL = "12 13 23 34"
C4 = "12 23 34 14"


@pytest.fixture
def personality():
    return datasets.load("personality")


@pytest.fixture
def classroom():
    return datasets.load("classroom")


@pytest.fixture
def infant():
    return datasets.load("infant")


@pytest.fixture
def accident():
    return datasets.load("accident")


@pytest.fixture
def wam():
    return datasets.load("wam")


def random_table(rng, levels, low=1, high=60, names=None):
    names = names or [str(i + 1) for i in range(len(levels))]
    factors = [FactorSpec(n, tuple(range(k))) for n, k in zip(names, levels)]
    counts = rng.integers(low, high, size=tuple(levels))
    records = [(idx, counts[idx]) for idx in np.ndindex(*levels)]
    return from_records(factors, records)
