"""Numerical kernels with a compiled core and a pure-Python fallback.

The compiled module is picked at import time. Set ``MIXEDFS_PURE_PYTHON=1``
to force the fallback.

Attributes
----------
BACKEND : str
    ``"cython"`` or ``"python"``.
"""

import os

from . import _pykernels

BACKEND = "python"
jacobi_eigh = _pykernels.jacobi_eigh
trace_index_sum = _pykernels.trace_index_sum

if not os.environ.get("MIXEDFS_PURE_PYTHON"):
    try:
        from . import _jacobi
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        jacobi_eigh = _jacobi.jacobi_eigh
        trace_index_sum = _jacobi.trace_index_sum


def kernels(backend=None):
    """Return ``(jacobi_eigh, trace_index_sum)`` for a named backend."""
    if backend is None:
        return jacobi_eigh, trace_index_sum
    if backend == "python":
        return _pykernels.jacobi_eigh, _pykernels.trace_index_sum
    if backend == "cython":
        from . import _jacobi

        return _jacobi.jacobi_eigh, _jacobi.trace_index_sum
    raise ValueError(f"unknown backend {backend!r}")


__all__ = ["BACKEND", "jacobi_eigh", "trace_index_sum", "kernels"]
