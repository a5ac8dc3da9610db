# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels: proportional fitting loop and incomplete gamma.

Mirrors ``gllm._pykernels`` function for function.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, lgamma, log, INFINITY

cnp.import_array()

cdef double _EPS = 1e-16
cdef double _FPMIN = 1e-300
cdef int _MAX_TERMS = 100000


def margin_sums(const double[::1] values, const cnp.intp_t[::1] index, Py_ssize_t size):
    """Sum ``values`` into ``size`` bins according to ``index``."""
    out = np.zeros(size, dtype=np.float64)
    cdef double[::1] acc = out
    cdef Py_ssize_t c, n = values.shape[0]
    for c in range(n):
        acc[index[c]] += values[c]
    return out


cdef void _accumulate(const double[::1] fitted, const cnp.intp_t[::1] idx,
                      double[::1] acc) noexcept nogil:
    cdef Py_ssize_t c, n = fitted.shape[0]
    acc[:] = 0.0
    for c in range(n):
        acc[idx[c]] += fitted[c]


def ipf_loop(double[::1] fitted, list index_maps, list observed, double tol, int max_iter):
    """Cyclic proportional fitting, in place on the flat array ``fitted``.

    Returns ``(cycles, max_deviation)``.
    """
    cdef Py_ssize_t g, c, k, n = fitted.shape[0]
    cdef Py_ssize_t ngen = len(index_maps)
    cdef int cycle
    cdef double deviation = INFINITY, diff
    cdef const cnp.intp_t[::1] idx
    cdef const double[::1] obs
    cdef double[::1] acc

    scratch = [np.empty(len(o), dtype=np.float64) for o in observed]

    for cycle in range(1, max_iter + 1):
        for g in range(ngen):
            idx = index_maps[g]
            obs = observed[g]
            acc = scratch[g]
            _accumulate(fitted, idx, acc)
            for k in range(acc.shape[0]):
                if acc[k] > 0.0:
                    acc[k] = obs[k] / acc[k]
                else:
                    acc[k] = 0.0
            for c in range(n):
                fitted[c] *= acc[idx[c]]
        deviation = 0.0
        for g in range(ngen):
            idx = index_maps[g]
            obs = observed[g]
            acc = scratch[g]
            _accumulate(fitted, idx, acc)
            for k in range(acc.shape[0]):
                diff = fabs(acc[k] - obs[k])
                if diff > deviation:
                    deviation = diff
        if deviation <= tol:
            return cycle, deviation
    return max_iter, deviation


cdef double _log_prefactor(double a, double x) noexcept nogil:
    return -x + a * log(x) - lgamma(a)


cdef double _lower_series(double a, double x) noexcept nogil:
    cdef double ap = a, term = 1.0 / a, total = term
    cdef int i
    for i in range(_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if fabs(term) < fabs(total) * _EPS:
            break
    return total * exp(_log_prefactor(a, x))


cdef double _upper_fraction(double a, double x) noexcept nogil:
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / _FPMIN
    cdef double d = 1.0 / b
    cdef double h = d, an, delta
    cdef int i
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            break
    return exp(_log_prefactor(a, x)) * h


def gammainc_pq(double a, double x):
    """Regularized incomplete gamma pair ``(P(a, x), Q(a, x))`` for a > 0."""
    cdef double p, q
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
