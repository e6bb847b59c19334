"""Dense complex-matrix substrate.

Hermitian eigendecomposition (cyclic Jacobi), spectral matrix functions,
row-major vectorization and the left/right multiplication superoperators.

Vectorization convention
------------------------
``vec`` stacks rows: ``vec(M)[i*n + j] = M[i, j]``, i.e. ``M.ravel()``.
With this choice ``vec(X @ M @ Y.T) == kron(X, Y) @ vec(M)`` and
``vec(M) == kron(M, I) @ vec(I)``, so ``vec(I)`` is the unnormalized
maximally entangled vector ``sum_i |i>|i>``. Superoperators are plain
``n**2 x n**2`` arrays acting on ``vec``.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, NonHermitianInput, ShapeError

HERMITIAN_TOL = 1e-12
JACOBI_RTOL = 1e-13
CLAMP_TOL = 1e-12
MAX_SWEEPS = 100


def as_complex_matrix(m, square=True):
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_residual(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def hermitian_part(m):
    return 0.5 * (m + dagger(m))


def _readonly(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues ascending, eigenvectors as the columns of a unitary."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ dagger(u)

    def apply(self, values):
        """``U diag(values) U^dagger`` for per-eigenvalue ``values``."""
        u = self.eigenvectors
        return (u * np.asarray(values)) @ dagger(u)

    def to_eigenbasis(self, m):
        u = self.eigenvectors
        return dagger(u) @ m @ u

    def from_eigenbasis(self, m):
        u = self.eigenvectors
        return u @ m @ dagger(u)


def _fix_phases(u):
    # largest-magnitude component of each column made real positive
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(u.shape[1])]
    return u * (np.conj(lead) / np.abs(lead))


def hermitian_eig(m, tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Square complex matrix with ``max|m - m^dagger| <= tol * max(1, max|m|)``.
    tol : float
        Hermiticity tolerance.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues; eigenvector phases fixed so that the
        largest-magnitude entry of each column is real and positive.
    """
    a = as_complex_matrix(m)
    n = a.shape[0]
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    res = hermiticity_residual(a)
    if res > tol * scale:
        raise NonHermitianInput(f"Hermiticity residual {res:.3e} exceeds {tol * scale:.1e}")
    if n == 0:
        return SpectralDecomposition(_readonly(np.zeros(0)), _readonly(np.zeros((0, 0), complex)))
    work = np.ascontiguousarray(hermitian_part(a))
    fro = float(np.linalg.norm(work))
    diag, vecs, sweeps = _kernels.jacobi_eigh(work, JACOBI_RTOL * fro, MAX_SWEEPS)
    if sweeps >= MAX_SWEEPS:
        raise ConvergenceError(f"Jacobi sweeps did not converge in {MAX_SWEEPS} sweeps")
    order = np.argsort(diag, kind="stable")
    vecs = _fix_phases(vecs[:, order])
    return SpectralDecomposition(_readonly(diag[order]), _readonly(vecs), sweeps)


def _scalar_map(f):
    if isinstance(f, str):
        if f == "sqrt":
            return np.sqrt, "sqrt"
        raise ValueError(f"unknown named function {f!r}")
    if isinstance(f, tuple) and len(f) == 2 and f[0] == "power":
        alpha = float(f[1])
        return (lambda x: np.power(x, alpha)), f"power({alpha:g})"
    func = getattr(f, "func", f)
    return func, getattr(f, "name", getattr(f, "__name__", "f"))


def clamp_spectrum(values, f=None, clamp_tol=CLAMP_TOL):
    """Clamp eigenvalues in ``[-clamp_tol, 0)`` to zero; anything lower is a DomainError."""
    values = np.array(values, dtype=float)
    if values.size and values.min() < -clamp_tol:
        raise DomainError(float(values.min()), f if f is not None else "psd")
    values[values < 0] = 0.0
    return values


def matrix_function(m, f, spectral=None, psd=True):
    """Spectral calculus ``U f(diag(lambda)) U^dagger`` for a Hermitian ``m``.

    ``f`` is an :class:`~mixedfs.meanslab.OperatorFunction`, a vectorized
    callable, ``"sqrt"`` or ``("power", alpha)``. With ``psd`` set the
    spectrum is clamped first (see :func:`clamp_spectrum`).
    """
    func, name = _scalar_map(f)
    sd = spectral if spectral is not None else hermitian_eig(m)
    lam = clamp_spectrum(sd.eigenvalues, name) if psd else np.array(sd.eigenvalues)
    with np.errstate(all="ignore"):
        vals = np.asarray(func(lam))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise DomainError(float(lam[np.argmax(bad)]), name)
    return sd.apply(vals)


def sqrtm_psd(m, spectral=None):
    return matrix_function(m, "sqrt", spectral)


def powm_psd(m, alpha, spectral=None):
    return matrix_function(m, ("power", alpha), spectral)


def vec(m):
    a = np.asarray(m)
    if a.ndim != 2:
        raise ShapeError(f"vec expects a matrix, got shape {a.shape}")
    return a.reshape(-1).copy()


def unvec(v, n):
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != n * n:
        raise ShapeError(f"vector of length {v.shape} cannot be reshaped to {n}x{n}")
    return v.reshape(n, n).copy()


def left_super(x):
    """Superoperator of ``M -> X M``."""
    x = as_complex_matrix(x)
    return np.kron(x, np.eye(x.shape[0]))


def right_super(x):
    """Superoperator of ``M -> M X``."""
    x = as_complex_matrix(x)
    return np.kron(np.eye(x.shape[0]), x.T)


def superop_apply(s, m):
    m = np.asarray(m)
    n = m.shape[0]
    if s.shape != (n * n, n * n):
        raise ShapeError(f"superoperator of shape {s.shape} cannot act on {m.shape}")
    return unvec(s @ vec(m), n)


def kraus_superop(kraus):
    """Superoperator of ``M -> sum_i A_i M A_i^dagger``."""
    return sum(np.kron(a, np.conj(a)) for a in kraus)


def commutator(a, b):
    return a @ b - b @ a


def min_eig(m):
    """Smallest eigenvalue of the Hermitian part of ``m``."""
    return float(hermitian_eig(hermitian_part(np.asarray(m, dtype=complex)), tol=np.inf).eigenvalues[0])


def haar_unitary(n, rng):
    """Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + dagger(z))


def unitarity_residual(u):
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[1]))))
