"""Compare the compiled and pure-Python kernels (and numpy's eigh as a reference).

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N] [--dims 2,4,8,16]

Prints one row per (kernel, size) with the median time per call for each
backend and the compiled speed-up.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from mixedfs._kernels import kernels


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def _hermitian(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def _density(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    r = g @ g.conj().T
    return np.ascontiguousarray(r / np.trace(r).real)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--dims", default="2,4,8,16")
    args = ap.parse_args(argv)
    dims = [int(d) for d in args.dims.split(",")]

    py_eigh, py_trace = kernels("python")
    try:
        cy_eigh, cy_trace = kernels("cython")
    except ImportError:
        print("compiled kernels not built; reinstall with Cython available", file=sys.stderr)
        return 1

    print(f"{'kernel':<22}{'size':>6}{'python':>12}{'cython':>12}{'numpy':>12}{'speed-up':>10}")
    for n in dims:
        h = _hermitian(n, n)
        tol = 1e-13 * np.linalg.norm(h)
        t_py = _time(lambda: py_eigh(h.copy(), tol, 100), args.repeat)
        t_cy = _time(lambda: cy_eigh(h.copy(), tol, 100), args.repeat)
        t_np = _time(lambda: np.linalg.eigh(h), args.repeat)
        print(f"{'jacobi_eigh':<22}{n:>6}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us{t_np * 1e6:>10.1f}us"
              f"{t_py / t_cy:>9.1f}x")
    for n, power in [(2, 4), (3, 4), (4, 4), (8, 4), (4, 6)]:
        rho = _density(n, power)
        t_py = _time(lambda: py_trace(rho, power), max(3, args.repeat // 4))
        t_cy = _time(lambda: cy_trace(rho, power), max(3, args.repeat // 4))
        t_np = _time(lambda: np.trace(np.linalg.matrix_power(rho, power)), args.repeat)
        label = f"trace_index_sum^{power}"
        print(f"{label:<22}{n:>6}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us{t_np * 1e6:>10.1f}us"
              f"{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
