# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Sturm-count bisection for symmetric tridiagonal matrices (compiled kernel)."""
import numpy as np

from libc.float cimport DBL_EPSILON, DBL_MIN
from libc.math cimport fabs, fmax


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2, double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t i, n = d.shape[0], neg = 0
    cdef double q = d[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        neg += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            neg += 1
    return neg


def sturm_count(const double[::1] d, const double[::1] e, double x):
    """Number of eigenvalues strictly below ``x``."""
    e2 = np.ascontiguousarray(np.square(e))
    pivmin = DBL_MIN * max(1.0, float(e2.max()) if e2.size else 1.0)
    return _count(d, e2, x, pivmin)


def tridiagonal_eigenvalues(const double[::1] d, const double[::1] e, Py_ssize_t k_lo, Py_ssize_t k_hi,
                            double abstol=0.0):
    """Eigenvalues with indices k_lo..k_hi (ascending, 0-based) by bisection."""
    cdef Py_ssize_t n = d.shape[0], k, i
    cdef double lo, hi, mid, glo, ghi, r, tol
    cdef double[::1] e2v
    e2 = np.ascontiguousarray(np.square(e)) if n > 1 else np.zeros(0)
    e2v = e2
    cdef double pivmin = DBL_MIN * fmax(1.0, float(e2.max()) if n > 1 else 1.0)
    glo = d[0]
    ghi = d[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += fabs(e[i - 1])
        if i < n - 1:
            r += fabs(e[i])
        if d[i] - r < glo:
            glo = d[i] - r
        if d[i] + r > ghi:
            ghi = d[i] + r
    out = np.empty(k_hi - k_lo + 1)
    cdef double[::1] res = out
    with nogil:
        for k in range(k_lo, k_hi + 1):
            lo = glo
            hi = ghi
            if k > k_lo:
                lo = res[k - k_lo - 1] - abstol
            while True:
                tol = abstol + 2.0 * DBL_EPSILON * fmax(fabs(lo), fabs(hi))
                if hi - lo <= tol:
                    break
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _count(d, e2v, mid, pivmin) > k:
                    hi = mid
                else:
                    lo = mid
            res[k - k_lo] = 0.5 * (lo + hi)
    return out
