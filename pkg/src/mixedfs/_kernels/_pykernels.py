"""Pure-Python/NumPy versions of the compiled kernels.

Same algorithms, same signatures as ``_jacobi.pyx``; used when the extension
is not built or ``MIXEDFS_PURE_PYTHON`` is set.
"""

import math

import numpy as np


def _offdiag_norm(a):
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return math.sqrt(float(np.vdot(off, off).real))


def jacobi_eigh(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    a[np.diag_indices(n)] = a.diagonal().real
    sweep = 0
    while _offdiag_norm(a) > tol and sweep < max_sweeps:
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                e = apq / r
                eb = e.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                x = a[:, p].copy()
                y = a[:, q].copy()
                a[:, p] = c * x - s * eb * y
                a[:, q] = s * x + c * eb * y
                x = a[p, :].copy()
                y = a[q, :].copy()
                a[p, :] = c * x - s * e * y
                a[q, :] = s * x + c * e * y
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0

                x = v[:, p].copy()
                y = v[:, q].copy()
                v[:, p] = c * x - s * eb * y
                v[:, q] = s * x + c * eb * y
    return a.diagonal().real.copy(), v, sweep


def trace_index_sum(rho, power, chunk=1 << 16):
    if power < 1:
        raise ValueError("power must be >= 1")
    n = rho.shape[0]
    total_terms = n**power
    flat = rho.ravel()
    total = 0.0j
    for start in range(0, total_terms, chunk):
        lin = np.arange(start, min(start + chunk, total_terms))
        # digits of the linear index, most significant first
        idx = np.empty((power, lin.size), dtype=np.intp)
        rem = lin
        for pos in range(power - 1, -1, -1):
            idx[pos] = rem % n
            rem = rem // n
        term = np.ones(lin.size, dtype=np.complex128)
        for j in range(power):
            term = term * flat[idx[j] * n + idx[(j + 1) % power]]
        total += term.sum()
    return complex(total)
