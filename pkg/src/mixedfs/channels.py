"""CPTP maps in Kraus form, Stinespring dilations and random channels."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import NotTracePreserving, ShapeError, TooManyKraus
from .opspace import _readonly, as_complex_matrix, dagger, kraus_superop, matrix_function, unitarity_residual
from .states import DensityMatrix, _rng, density

TP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving map ``rho -> sum_i A_i rho A_i^dagger``."""

    kraus: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(_readonly(as_complex_matrix(a, square=False)) for a in self.kraus)
        if not ops:
            raise ShapeError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(a.shape != shape for a in ops):
            raise ShapeError("Kraus operators differ in shape")
        resid = self.tp_residual(ops)
        if resid > TP_TOL:
            raise NotTracePreserving(f"sum A_i^dagger A_i differs from identity by {resid:.2e}")
        object.__setattr__(self, "kraus", ops)

    @staticmethod
    def tp_residual(ops):
        s = sum(dagger(a) @ a for a in ops)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    @property
    def in_dim(self):
        return self.kraus[0].shape[1]

    @property
    def out_dim(self):
        return self.kraus[0].shape[0]

    def __len__(self):
        return len(self.kraus)

    def is_unital(self, tol=1e-9):
        s = sum(a @ dagger(a) for a in self.kraus)
        return bool(np.max(np.abs(s - np.eye(self.out_dim))) <= tol)

    def superoperator(self):
        """Matrix of the channel on row-major ``vec`` space."""
        return kraus_superop(self.kraus)

    def adjoint_superoperator(self):
        return dagger(self.superoperator())

    def _check(self, m):
        if m.shape != (self.in_dim, self.in_dim):
            raise ShapeError(f"channel input dim {self.in_dim}, got {m.shape}")


def identity_channel(n):
    return KrausChannel((np.eye(n),))


def unitary_channel(u):
    return KrausChannel((as_complex_matrix(u),))


def dephasing_channel(p):
    """Qubit dephasing ``{sqrt(1-p) I, sqrt(p) Z}``."""
    z = np.diag([1.0, -1.0])
    return KrausChannel((np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * z))


def depolarizing_channel(p):
    """Qubit depolarizing map; ``p = 1`` sends every state to ``I/2``."""
    x = np.array([[0, 1], [1, 0]], complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0]).astype(complex)
    return KrausChannel((np.sqrt(1 - 3 * p / 4) * np.eye(2), *(np.sqrt(p / 4) * s for s in (x, y, z))))


def apply(ch, rho):
    rho = density(rho)
    ch._check(rho.matrix)
    return DensityMatrix(sum(a @ rho.matrix @ dagger(a) for a in ch.kraus))


def apply_tangent(ch, tangent):
    t = as_complex_matrix(tangent)
    ch._check(t)
    return sum(a @ t @ dagger(a) for a in ch.kraus)


@dataclass(frozen=True)
class KrausPushforward:
    """``sum_i A_i sqrt(rho) A_i^dagger`` and how far it is from ``sqrt(E(rho))``.

    ``deviation`` is the Frobenius distance to ``sqrt(E(rho))``; ``norm_defect``
    is ``1 - ||M||_F^2``, the loss of norm of the purification vector ``vec(M)``.
    """

    matrix: np.ndarray
    deviation: float
    norm_defect: float


def sqrt_kraus_pushforward(rho, ch):
    rho = density(rho)
    ch._check(rho.matrix)
    m = sum(a @ rho.sqrt @ dagger(a) for a in ch.kraus)
    target = matrix_function(apply(ch, rho).matrix, "sqrt")
    dev = float(np.linalg.norm(m - target))
    defect = float(1.0 - np.vdot(m, m).real)
    return KrausPushforward(_readonly(m), dev, defect)


@dataclass(frozen=True, eq=False)
class StinespringDilation:
    """Unitary ``U`` on system (x) environment with environment state ``env_state``.

    Index convention: ``|x>|e>`` sits at ``x * env_dim + e``.
    """

    unitary: np.ndarray
    env_state: np.ndarray
    sys_dim: int
    env_dim: int

    def apply(self, rho):
        rho = density(rho)
        nu = self.env_state
        joint = np.kron(rho.matrix, np.outer(nu, nu.conj()))
        out = self.unitary @ joint @ dagger(self.unitary)
        n, m = self.sys_dim, self.env_dim
        return np.einsum("aebe->ab", out.reshape(n, m, n, m))


def _complete_unitary(cols, dim, rng):
    """Extend orthonormal columns to a unitary by Gram-Schmidt over random vectors."""
    basis = [c for c in cols.T]
    while len(basis) < dim:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
    return np.column_stack(basis)


def stinespring(ch, seed=0):
    """Minimal dilation: environment dimension equals the number of Kraus operators."""
    n = ch.in_dim
    if ch.out_dim != n:
        raise ShapeError("Stinespring dilation implemented for square channels only")
    m = len(ch)
    if m > n * n:
        raise TooManyKraus(f"{m} Kraus operators exceed the budget {n * n}")
    d = n * m
    iso = np.zeros((d, n), dtype=complex)
    for i, a in enumerate(ch.kraus):
        iso[i::m, :] = a  # rows (s, i) -> s*m + i
    rng = _rng(seed)
    # columns |x>|0> come from the isometry; the rest complete the unitary
    fixed_idx = [x * m for x in range(n)]
    other = _complete_unitary(iso, d, rng)[:, n:]
    u = np.empty((d, d), dtype=complex)
    u[:, fixed_idx] = iso
    u[:, [j for j in range(d) if j not in set(fixed_idx)]] = other
    nu = np.zeros(m, dtype=complex)
    nu[0] = 1.0
    return StinespringDilation(_readonly(u), _readonly(nu), n, m)


def random_channel(dim, kraus_count, seed=None):
    """Kraus operators sliced from a Haar-random isometry ``C^dim -> C^(dim*k)``."""
    if kraus_count < 1:
        raise ValueError("kraus_count must be >= 1")
    rng = _rng(seed)
    d = dim * kraus_count
    z = (rng.standard_normal((d, dim)) + 1j * rng.standard_normal((d, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return KrausChannel(tuple(q[i * dim:(i + 1) * dim, :] for i in range(kraus_count)))


def is_unitary(u, tol=1e-9):
    return unitarity_residual(u) <= tol
