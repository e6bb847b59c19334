# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: cyclic complex Jacobi sweeps and explicit trace index sums."""

import numpy as np

from libc.math cimport sqrt, fabs, hypot


cdef inline double _cabs(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef double _offdiag_norm(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    cdef double complex z
    for i in range(n):
        for j in range(n):
            if i != j:
                z = a[i, j]
                s += z.real * z.real + z.imag * z.imag
    return sqrt(s)


def jacobi_eigh(double complex[:, ::1] a, double tol, int max_sweeps):
    """Diagonalize the Hermitian matrix ``a`` in place.

    Returns ``(diag, vectors, sweeps)``; ``diag`` is unsorted.
    Convergence when the off-diagonal Frobenius norm drops to ``tol``.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double r, app, aqq, tau, t, c, s
    cdef double complex e, eb, x, y
    vecs = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] v = vecs

    with nogil:
        for k in range(n):
            a[k, k] = a[k, k].real
        while _offdiag_norm(a, n) > tol:
            if sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = _cabs(a[p, q])
                    if r == 0.0:
                        continue
                    e = a[p, q] / r
                    eb = e.conjugate()
                    app = a[p, p].real
                    aqq = a[q, q].real
                    tau = (aqq - app) / (2.0 * r)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        x = a[k, p]
                        y = a[k, q]
                        a[k, p] = c * x - s * eb * y
                        a[k, q] = s * x + c * eb * y
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = c * x - s * e * y
                        a[q, k] = s * x + c * e * y
                    a[p, p] = app - t * r
                    a[q, q] = aqq + t * r
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = c * x - s * eb * y
                        v[k, q] = s * x + c * eb * y

    diag = np.empty(n, dtype=np.float64)
    cdef double[::1] d = diag
    for k in range(n):
        d[k] = a[k, k].real
    return diag, vecs, sweep


def trace_index_sum(const double complex[:, ::1] rho, int power):
    """Sum rho[i1,i2] rho[i2,i3] ... rho[ip,i1] over every index tuple."""
    cdef Py_ssize_t n = rho.shape[0]
    cdef Py_ssize_t j, pos
    cdef double complex term, total = 0.0
    if power < 1:
        raise ValueError("power must be >= 1")
    idx_arr = np.zeros(power, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    with nogil:
        while True:
            term = 1.0
            for j in range(power - 1):
                term = term * rho[idx[j], idx[j + 1]]
            term = term * rho[idx[power - 1], idx[0]]
            total = total + term
            pos = power - 1
            while pos >= 0:
                idx[pos] += 1
                if idx[pos] < n:
                    break
                idx[pos] = 0
                pos -= 1
            if pos < 0:
                break
    return complex(total)
