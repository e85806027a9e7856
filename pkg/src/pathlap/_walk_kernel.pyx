# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel for the lazy walk on oriented path states.

Consumes a pregenerated uniform matrix (one row per trajectory) and
accumulates per-step visit counts.  The arithmetic mirrors the numpy
fallback expression-for-expression so both backends are bit-identical.
"""

import numpy as np

cimport numpy as cnp


def simulate_counts(cnp.int64_t[::1] indptr,
                    cnp.int64_t[::1] targets,
                    double p_lazy,
                    Py_ssize_t start,
                    double[:, ::1] uniforms,
                    cnp.int64_t[:, ::1] counts):
    cdef Py_ssize_t n_samples = uniforms.shape[0]
    cdef Py_ssize_t n_steps = uniforms.shape[1]
    cdef Py_ssize_t i, n
    cdef cnp.int64_t s, lo, m, j
    cdef double u

    counts[0, start] += n_samples
    for i in range(n_samples):
        s = start
        for n in range(n_steps):
            u = uniforms[i, n]
            if u >= p_lazy:
                lo = indptr[s]
                m = indptr[s + 1] - lo
                j = <cnp.int64_t>((u - p_lazy) / (1.0 - p_lazy) * <double>m)
                if j > m - 1:
                    j = m - 1
                s = targets[lo + j]
            counts[n + 1, s] += 1
