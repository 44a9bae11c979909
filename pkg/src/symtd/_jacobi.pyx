# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi sweeps for dense symmetric matrices (double or long double)."""

import numpy as np
from libc.math cimport fabs, fabsl, sqrt, sqrtl

ctypedef fused real:
    double
    long double


cdef inline real _sqrt(real x) noexcept nogil:
    if real is double:
        return sqrt(x)
    else:
        return sqrtl(x)


cdef inline real _abs(real x) noexcept nogil:
    if real is double:
        return fabs(x)
    else:
        return fabsl(x)


cdef int _sweeps(real[:, ::1] a, real[:, ::1] v, int max_sweeps, real rtol) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef real off, total, theta, t, c, s, apq, akp, akq, vkp, vkq
    cdef int sweep
    for sweep in range(max_sweeps + 1):
        off = 0
        total = 0
        for p in range(n):
            total += a[p, p] * a[p, p]
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        total += 2 * off
        if off <= rtol * rtol * total:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if _abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                if _abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1 / (_abs(theta) + _sqrt(theta * theta + 1))
                    if theta < 0:
                        t = -t
                c = 1 / _sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                    a[p, k] = a[k, p]
                    a[q, k] = a[k, q]
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0
                a[q, p] = 0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


def jacobi_eigh(m, int max_sweeps=50, rtol=None):
    """Return ``(values, vectors, sweeps)``; ``sweeps == -1`` on non-convergence.

    ``longdouble`` input is diagonalized in extended precision, anything else
    in double.
    """
    m = np.asarray(m)
    if m.dtype == np.longdouble:
        return _run_ld(np.array(m, dtype=np.longdouble, order="C", copy=True), max_sweeps,
                       1e-18 if rtol is None else rtol)
    return _run_d(np.array(m, dtype=np.float64, order="C", copy=True), max_sweeps,
                  1e-15 if rtol is None else rtol)


def _run_d(double[:, ::1] a, int max_sweeps, double rtol):
    cdef double[:, ::1] v = np.eye(a.shape[0], dtype=np.float64)
    cdef int sweeps
    with nogil:
        sweeps = _sweeps(a, v, max_sweeps, rtol)
    return np.diagonal(np.asarray(a)).copy(), np.asarray(v), sweeps


def _run_ld(long double[:, ::1] a, int max_sweeps, long double rtol):
    cdef long double[:, ::1] v = np.eye(a.shape[0], dtype=np.longdouble)
    cdef int sweeps
    with nogil:
        sweeps = _sweeps(a, v, max_sweeps, rtol)
    return np.diagonal(np.asarray(a)).copy(), np.asarray(v), sweeps
