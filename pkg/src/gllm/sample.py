"""Synthetic tables under Poisson, multinomial and product-multinomial sampling.

All draws use NumPy's PCG64 generator seeded from the caller's seed, so the
same inputs and seed give the same table on every run of a given NumPy build.
"""
from dataclasses import dataclass

import numpy as np

from gllm.markov import JointDistribution
from gllm.table import ContingencyTable

POISSON = "poisson"
MULTINOMIAL = "multinomial"
PRODUCT_MULTINOMIAL = "product-multinomial"
SCHEMES = (POISSON, MULTINOMIAL, PRODUCT_MULTINOMIAL)


def rng_identity() -> str:
    return f"numpy.random.PCG64 (numpy {np.__version__})"


def make_rng(seed: int) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class SamplingScheme:
    kind: str
    fixed_factors: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCHEMES:
            raise ValueError(f"unknown sampling scheme {self.kind!r}")
        object.__setattr__(self, "fixed_factors", frozenset(self.fixed_factors))
        if bool(self.fixed_factors) != (self.kind == PRODUCT_MULTINOMIAL):
            raise ValueError("fixed factors are required for, and only for, product-multinomial")


def sample_poisson(means: ContingencyTable, seed: int) -> ContingencyTable:
    """Independent Poisson draw per cell."""
    rng = make_rng(seed)
    return means.with_counts(rng.poisson(means.counts).astype(np.float64))


def sample_multinomial(n_total: int, probs: JointDistribution, seed: int) -> ContingencyTable:
    """Multinomial draw of ``n_total`` individuals over the cells of ``probs``."""
    if n_total < 0 or int(n_total) != n_total:
        raise ValueError("n_total must be a nonnegative integer")
    rng = make_rng(seed)
    p = probs.probs.ravel()
    draw = rng.multinomial(int(n_total), p / p.sum())
    return ContingencyTable(probs.factors, draw.astype(np.float64))


def sample_product_multinomial(expected: ContingencyTable, fixed_factors, seed: int) -> ContingencyTable:
    """Independent multinomial per slice of ``fixed_factors``, keeping slice totals."""
    fixed = set(fixed_factors)
    if not fixed:
        raise ValueError("need at least one fixed factor")
    fixed_axes = expected.axes(sorted(fixed, key=expected.names.index))
    free_axes = tuple(i for i in range(len(expected.names)) if i not in fixed_axes)
    # fixed axes first, free axes flattened last
    moved = np.transpose(expected.counts, fixed_axes + free_axes)
    nfixed = int(np.prod([expected.shape[a] for a in fixed_axes]))
    slices = moved.reshape(nfixed, -1)
    totals = slices.sum(axis=1)
    if np.any(totals != np.round(totals)) or np.any(totals <= 0):
        raise ValueError("fixed margins must be positive integers")
    rng = make_rng(seed)
    out = np.empty_like(slices)
    for k in range(nfixed):
        out[k] = rng.multinomial(int(round(totals[k])), slices[k] / totals[k])
    out = out.reshape(moved.shape)
    inverse = np.argsort(fixed_axes + free_axes)
    return expected.with_counts(np.transpose(out, inverse))


def sample(scheme: SamplingScheme, table: ContingencyTable, n_total: int | None = None) -> ContingencyTable:
    """Dispatch on ``scheme``; ``table`` holds means, probabilities or expected counts."""
    if scheme.kind == POISSON:
        return sample_poisson(table, scheme.seed)
    if scheme.kind == MULTINOMIAL:
        n = int(round(table.total)) if n_total is None else n_total
        return sample_multinomial(n, JointDistribution.from_weights(table.factors, table.counts),
                                  scheme.seed)
    return sample_product_multinomial(table, scheme.fixed_factors, scheme.seed)
