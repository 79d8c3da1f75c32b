# cython: language_level=3
"""Compiled pairwise kernels: one fused pass over pairs, no pair matrix.

Memory stays O(1) per pair regardless of class size, and the loops run
without the GIL so callers can spread classes or layers across threads.
"""

cimport cython
from libc.math cimport INFINITY, fabs, sqrt

cdef double EPS = 1e-12  # cosine denominator guard, matches the numpy path


@cython.boundscheck(False)
@cython.wraparound(False)
def within_class(const double[:, ::1] x, const double[::1] norms):
    """Sum of pair cosines and min |cosine| over distinct unordered pairs."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dot, c, total = 0.0, min_abs = INFINITY
    if n < 2:
        raise ValueError("within_class needs at least two rows")
    if norms.shape[0] != n:
        raise ValueError("norms length must match rows")
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                dot = 0.0
                for k in range(d):
                    dot += x[i, k] * x[j, k]
                c = dot / (norms[i] * norms[j] + EPS)
                total += c
                if fabs(c) < min_abs:
                    min_abs = fabs(c)
    return total, min_abs


@cython.boundscheck(False)
@cython.wraparound(False)
def between_class(const double[:, ::1] xa, const double[::1] na,
                  const double[:, ::1] xb, const double[::1] nb):
    """Cross-class cosine sum and minimum Euclidean distance, fused."""
    cdef Py_ssize_t ra = xa.shape[0]
    cdef Py_ssize_t rb = xb.shape[0]
    cdef Py_ssize_t d = xa.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dot, dsq, diff, total = 0.0, min_dsq = INFINITY
    if ra < 1 or rb < 1:
        raise ValueError("between_class needs at least one row per side")
    if xb.shape[1] != d:
        raise ValueError("row width mismatch")
    with nogil:
        for i in range(ra):
            for j in range(rb):
                dot = 0.0
                dsq = 0.0
                for k in range(d):
                    dot += xa[i, k] * xb[j, k]
                    diff = xa[i, k] - xb[j, k]
                    dsq += diff * diff
                total += dot / (na[i] * nb[j] + EPS)
                if dsq < min_dsq:
                    min_dsq = dsq
    return total, sqrt(min_dsq)
