import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedfs import _kernels
from mixedfs._kernels import BACKEND, kernels

from conftest import random_density_np, random_hermitian_np, seeds

BACKENDS = ["python"] + (["cython"] if BACKEND == "cython" else [])


def test_backend_is_named():
    assert BACKEND in ("cython", "python")


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels("fortran")


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_jacobi_matches_numpy_eigvalsh(backend, n, rng):
    eigh, _ = kernels(backend)
    a = random_hermitian_np(rng, n)
    diag, vecs, sweeps = eigh(np.ascontiguousarray(a.copy()), 1e-13 * np.linalg.norm(a), 100)
    assert sweeps < 100
    np.testing.assert_allclose(np.sort(diag), np.linalg.eigvalsh(a), atol=1e-11)
    np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(n), atol=1e-12)
    np.testing.assert_allclose((vecs * diag) @ vecs.conj().T, a, atol=1e-11)


@pytest.mark.skipif(BACKEND != "cython", reason="compiled core not built")
@given(seed=seeds, n=st.integers(2, 9))
def test_backends_agree(seed, n):
    a = random_hermitian_np(np.random.default_rng(seed), n)
    tol = 1e-13 * np.linalg.norm(a)
    dp, _, _ = kernels("python")[0](np.ascontiguousarray(a.copy()), tol, 100)
    dc, _, _ = kernels("cython")[0](np.ascontiguousarray(a.copy()), tol, 100)
    np.testing.assert_allclose(np.sort(dp), np.sort(dc), atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n,power", [(2, 2), (2, 3), (3, 4), (4, 5)])
def test_trace_index_sum_matches_matrix_power(backend, n, power, rng):
    _, tis = kernels(backend)
    rho = random_density_np(rng, n)
    expect = np.trace(np.linalg.matrix_power(rho, power))
    assert abs(complex(tis(np.ascontiguousarray(rho), power)) - expect) < 1e-12


def test_pure_python_fallback_selected_by_env(monkeypatch):
    import importlib

    monkeypatch.setenv("MIXEDFS_PURE_PYTHON", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("MIXEDFS_PURE_PYTHON")
        importlib.reload(_kernels)
