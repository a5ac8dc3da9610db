"""Goodness-of-fit statistics and chi-square tail probabilities."""
from dataclasses import dataclass

import numpy as np

from gllm import kernels
from gllm.table import ContingencyTable


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    g2: float
    pearson_x2: float
    df: int
    p_g2: float
    p_x2: float


def _arrays(obs, exp):
    o = obs.counts if isinstance(obs, ContingencyTable) else np.asarray(obs, dtype=float)
    e = exp.counts if isinstance(exp, ContingencyTable) else np.asarray(exp, dtype=float)
    if o.shape != e.shape:
        raise ValueError(f"shape mismatch: {o.shape} vs {e.shape}")
    if isinstance(obs, ContingencyTable) and isinstance(exp, ContingencyTable):
        if obs.names != exp.names:
            raise ValueError("observed and expected tables have different factors")
    if np.any((e == 0) & (o > 0)):
        raise ValueError("expected count is zero where the observed count is positive")
    return o, e


def pearson_chi2(obs, exp) -> float:
    """Sum of (O - E)^2 / E over cells with E > 0."""
    o, e = _arrays(obs, exp)
    pos = e > 0
    return float(np.sum((o[pos] - e[pos]) ** 2 / e[pos]))


def deviance_g2(obs, exp) -> float:
    """-2 * sum O log(E / O); cells with O = 0 contribute nothing."""
    o, e = _arrays(obs, exp)
    pos = o > 0
    g2 = 2.0 * float(np.sum(o[pos] * np.log(o[pos] / e[pos])))
    # fitted tables matching the data up to rounding give tiny negative sums
    return max(g2, 0.0)


def _check_df(df) -> float:
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {df!r}")
    return float(df)


def chi2_sf(x: float, df: int) -> float:
    """Upper tail P(X >= x) for X ~ chi-square(df)."""
    k = _check_df(df)
    if x < 0:
        raise ValueError("x must be nonnegative")
    return kernels.gammainc_pq(k / 2.0, x / 2.0)[1]


def chi2_cdf(x: float, df: int) -> float:
    """Lower tail P(X <= x) for X ~ chi-square(df)."""
    k = _check_df(df)
    if x < 0:
        raise ValueError("x must be nonnegative")
    return kernels.gammainc_pq(k / 2.0, x / 2.0)[0]


def p_value(stat: float, df: int) -> float:
    """Chi-square p-value; df = 0 is the point mass at zero."""
    if df == 0:
        return 1.0 if stat <= 1e-9 else 0.0
    return chi2_sf(stat, df)


def goodness_of_fit(obs: ContingencyTable, exp: ContingencyTable, df: int) -> TestReport:
    g2 = deviance_g2(obs, exp)
    x2 = pearson_chi2(obs, exp)
    return TestReport(g2=g2, pearson_x2=x2, df=int(df), p_g2=p_value(g2, df), p_x2=p_value(x2, df))
