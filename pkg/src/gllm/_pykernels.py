"""Pure-Python/NumPy implementations of the numeric kernels.

Used when the compiled ``_kernels`` extension is unavailable, or when
``GLLM_PURE_PYTHON=1`` is set. Signatures and results match the compiled
module; ``tests/test_kernels.py`` runs both against the same expectations.
"""
import math

import numpy as np

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_TERMS = 100000


def margin_sums(values, index, size):
    """Sum ``values`` into ``size`` bins according to ``index``."""
    return np.bincount(index, weights=values, minlength=size)


def ipf_loop(fitted, index_maps, observed, tol, max_iter):
    """Cyclic proportional fitting, in place on the flat array ``fitted``.

    Each cycle rescales ``fitted`` so that its margin under ``index_maps[g]``
    matches ``observed[g]``, for every g in turn. After each cycle the largest
    absolute margin deviation over all generators is measured; iteration
    stops once it is <= ``tol``.

    Returns ``(cycles, max_deviation)``.
    """
    deviation = math.inf
    for cycle in range(1, max_iter + 1):
        for idx, obs in zip(index_maps, observed):
            current = np.bincount(idx, weights=fitted, minlength=obs.shape[0])
            ratio = np.zeros_like(current)
            np.divide(obs, current, out=ratio, where=current > 0)
            fitted *= ratio[idx]
        deviation = 0.0
        for idx, obs in zip(index_maps, observed):
            current = np.bincount(idx, weights=fitted, minlength=obs.shape[0])
            deviation = max(deviation, float(np.max(np.abs(current - obs))))
        if deviation <= tol:
            return cycle, deviation
    return max_iter, deviation


def _log_prefactor(a, x):
    return -x + a * math.log(x) - math.lgamma(a)


def _lower_series(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(_log_prefactor(a, x))


def _upper_fraction(a, x):
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(_log_prefactor(a, x)) * h


def gammainc_pq(a, x):
    """Regularized incomplete gamma pair ``(P(a, x), Q(a, x))`` for a > 0."""
    if a <= 0.0:
        raise ValueError("shape parameter must be positive")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 0.0, 1.0
    if x < a + 1.0:
        p = min(_lower_series(a, x), 1.0)
        return p, 1.0 - p
    q = min(_upper_fraction(a, x), 1.0)
    return 1.0 - q, q
