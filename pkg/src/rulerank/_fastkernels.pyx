# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``; same two-pass algorithms."""

from libc.math cimport fabs, sqrt


def studentized_moments(const double[::1] d, double kappa, double shift):
    cdef Py_ssize_t i, m = d.shape[0]
    cdef double x, s = 0.0
    for i in range(m):
        x = d[i] - shift
        s += x - kappa * fabs(x)
    cdef double mean = s / m
    cdef double ss = 0.0, dev
    for i in range(m):
        x = d[i] - shift
        dev = (x - kappa * fabs(x)) - mean
        ss += dev * dev
    return mean, sqrt(ss / (m * (m - 1.0)))


def signed_moments(const double[::1] d):
    cdef Py_ssize_t i, m = d.shape[0]
    cdef double s = 0.0, sa = 0.0
    for i in range(m):
        s += d[i]
        sa += fabs(d[i])
    cdef double mean = s / m, mean_abs = sa / m
    cdef double vv = 0.0, va = 0.0, cv = 0.0, dev, dev_abs
    for i in range(m):
        dev = d[i] - mean
        dev_abs = fabs(d[i]) - mean_abs
        vv += dev * dev
        va += dev_abs * dev_abs
        cv += dev * dev_abs
    return mean, mean_abs, vv / m, va / m, cv / m
