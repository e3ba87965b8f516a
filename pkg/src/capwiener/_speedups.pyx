# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled windowed Gaussian sums (see ``_kernels`` for the reference version)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt, M_PI

cnp.import_array()


cdef Py_ssize_t _lower(const double[::1] a, double v) nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def gauss_sums_1d(const double[::1] y, const double[::1] atoms, const double[::1] weights,
                  const cnp.int64_t[::1] groups, Py_ssize_t ngroups, double s, double cutoff):
    cdef Py_ssize_t ny = y.shape[0], na = atoms.shape[0]
    cdef Py_ssize_t i, j, j0
    cdef double c = 1.0 / sqrt(4.0 * M_PI * s), inv = 1.0 / (4.0 * s), d, yi, pad
    out = np.zeros((ny, ngroups), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(ny):
            yi = y[i]
            # pad the window so rounding in yi -/+ cutoff cannot drop an atom the distance test keeps
            pad = 1e-12 * (fabs(yi) + cutoff)
            j0 = _lower(atoms, yi - cutoff - pad)
            j = j0
            while j < na and atoms[j] <= yi + cutoff + pad:
                d = yi - atoms[j]
                if fabs(d) <= cutoff:
                    o[i, groups[j]] += weights[j] * c * exp(-d * d * inv)
                j += 1
    return out
