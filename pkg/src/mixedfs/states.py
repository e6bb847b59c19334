"""Density matrices, parameterized state families, purifications and sampling."""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    BadFamily,
    BadRank,
    NonUnitaryGauge,
    NonUnitState,
    NotADensityMatrix,
    ShapeError,
    SimplexViolation,
)
from .opspace import (
    _readonly,
    as_complex_matrix,
    commutator,
    dagger,
    hermitian_eig,
    hermiticity_residual,
    matrix_function,
    unitarity_residual,
    vec,
)

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)
SNAP_EPS = 64 * np.finfo(float).eps


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite unit-trace Hermitian matrix with a cached eigendecomposition."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        res = hermiticity_residual(m)
        if res > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
            raise NotADensityMatrix(f"not Hermitian (residual {res:.2e})")
        m = 0.5 * (m + dagger(m))
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotADensityMatrix(f"trace {tr!r} differs from 1")
        object.__setattr__(self, "matrix", _readonly(m))
        sd = self.spectral
        if sd.eigenvalues[0] < -PSD_TOL:
            raise NotADensityMatrix(f"negative eigenvalue {sd.eigenvalues[0]:.3e}")

    @cached_property
    def spectral(self):
        # rounding-level eigenvalues are exact zeros; their square roots would be ~1e-8
        sd = hermitian_eig(self.matrix)
        lam = np.array(sd.eigenvalues)
        lam[np.abs(lam) <= SNAP_EPS * self.dim] = 0.0
        return replace(sd, eigenvalues=_readonly(lam))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def eigenvalues(self):
        return self.spectral.eigenvalues

    @cached_property
    def sqrt(self):
        return _readonly(matrix_function(self.matrix, "sqrt", self.spectral))

    def power(self, alpha):
        return matrix_function(self.matrix, ("power", alpha), self.spectral)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues[0])

    def rank(self, tol=1e-10):
        return int(np.sum(self.eigenvalues > tol))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def density(m):
    return m if isinstance(m, DensityMatrix) else DensityMatrix(m)


@dataclass(frozen=True, eq=False)
class StateFamily:
    """Differentiable map from a parameter tuple to density matrices.

    ``derivative`` returns the list of partial derivatives at a point; when it
    is ``None`` central finite differences with step ``step`` are used.
    ``description`` is the JSON form this family was built from (if any).
    """

    dim: int
    param_count: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], list]] = None
    step: Optional[float] = None
    kind: str = "custom"
    description: dict = field(default_factory=dict)
    box: Optional[Sequence[tuple]] = None

    def _theta(self, theta):
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        if t.shape != (self.param_count,):
            raise ShapeError(f"expected {self.param_count} parameter(s), got {t.shape}")
        return t

    def rho(self, theta):
        return DensityMatrix(self.evaluator(self._theta(theta)))

    def derivatives(self, theta):
        t = self._theta(theta)
        if self.derivative is None:
            return self.fd_derivatives(t, self.step)
        return [np.asarray(d, dtype=complex) for d in self.derivative(t)]

    def fd_derivatives(self, theta, h=None):
        t = self._theta(theta)
        out = []
        for k in range(self.param_count):
            hk = h if h is not None else FD_STEP * (1.0 + abs(t[k]))
            e = np.zeros_like(t)
            e[k] = hk
            out.append((np.asarray(self.evaluator(t + e)) - np.asarray(self.evaluator(t - e))) / (2 * hk))
        return out

    @property
    def analytic(self):
        return self.derivative is not None


def _expi(h_spec, t):
    return h_spec.apply(np.exp(1j * h_spec.eigenvalues * t))


def family_unitary_orbit(rho0, h):
    """One-parameter family ``t -> exp(iHt) rho0 exp(-iHt)``, derivative ``i[H, rho(t)]``."""
    rho0 = density(rho0)
    h = as_complex_matrix(h)
    if h.shape != rho0.matrix.shape:
        raise ShapeError(f"H has shape {h.shape}, rho0 has {rho0.matrix.shape}")
    hs = hermitian_eig(h)
    r0 = np.array(rho0.matrix)

    def evaluate(t):
        u = _expi(hs, t[0])
        return u @ r0 @ dagger(u)

    def derivative(t):
        return [1j * commutator(h, evaluate(t))]

    desc = {"kind": "unitary_orbit", "rho0": r0, "H": h}
    return StateFamily(rho0.dim, 1, evaluate, derivative, kind="unitary_orbit", description=desc)


def family_eigenvalue_path(offset, slope, basis=None, interval=(0.0, 1.0)):
    """Commuting family ``U diag(offset + theta*slope) U^dagger``.

    The path must lie on the probability simplex over ``interval``.
    """
    offset = np.asarray(offset, dtype=float)
    slope = np.asarray(slope, dtype=float)
    n = offset.shape[0]
    if slope.shape != (n,):
        raise ShapeError("offset and slope lengths differ")
    u = np.eye(n, dtype=complex) if basis is None else as_complex_matrix(basis)
    if u.shape != (n, n) or unitarity_residual(u) > 1e-10:
        raise ShapeError("basis must be an n x n unitary")
    if abs(offset.sum() - 1.0) > 1e-12 or abs(slope.sum()) > 1e-12:
        raise SimplexViolation("eigenvalue path leaves the unit-trace hyperplane")
    lo, hi = interval
    for end in (lo, hi):
        if np.any(offset + end * slope < -1e-15):
            raise SimplexViolation(f"negative eigenvalue at theta={end}")

    def lam(t):
        x = offset + t[0] * slope
        if np.any(x < -1e-15):
            raise SimplexViolation(f"negative eigenvalue at theta={t[0]}")
        return x

    def evaluate(t):
        return (u * lam(t)) @ dagger(u)

    def derivative(t):
        return [(u * slope) @ dagger(u)]

    desc = {"kind": "eigenvalue_path", "offset": offset.tolist(), "slope": slope.tolist(),
            "basis": u, "interval": [float(lo), float(hi)]}
    return StateFamily(n, 1, evaluate, derivative, kind="eigenvalue_path", description=desc,
                       box=[(lo, hi)])


def family_ginibre_path(g0, directions):
    """Full-rank family ``G G^dagger / Tr(G G^dagger)`` with ``G = G0 + sum_k theta_k G_k``."""
    g0 = np.asarray(g0, dtype=complex)
    dirs = [np.asarray(d, dtype=complex) for d in directions]
    if not dirs or any(d.shape != g0.shape for d in dirs):
        raise ShapeError("directions must be nonempty and match G0's shape")

    def gmat(t):
        return g0 + sum(tk * d for tk, d in zip(t, dirs))

    def evaluate(t):
        g = gmat(t)
        m = g @ dagger(g)
        return m / np.trace(m).real

    def derivative(t):
        g = gmat(t)
        m = g @ dagger(g)
        tr = np.trace(m).real
        out = []
        for d in dirs:
            dm = d @ dagger(g) + g @ dagger(d)
            out.append(dm / tr - m * np.trace(dm).real / tr**2)
        return out

    desc = {"kind": "ginibre_path", "G0": g0, "directions": dirs}
    return StateFamily(g0.shape[0], len(dirs), evaluate, derivative, kind="ginibre_path",
                       description=desc)


def family_linear(rho0, tangents):
    """Affine family ``rho0 + sum_k theta_k A_k``; valid only where it stays positive."""
    rho0 = density(rho0)
    tans = [as_complex_matrix(a) for a in tangents]
    for a in tans:
        if a.shape != rho0.matrix.shape:
            raise ShapeError("tangent shape differs from rho0")
        if abs(np.trace(a)) > 1e-10 or hermiticity_residual(a) > 1e-10:
            raise BadFamily("tangents must be traceless Hermitian")
    r0 = np.array(rho0.matrix)

    def evaluate(t):
        return r0 + sum(tk * a for tk, a in zip(t, tans))

    def derivative(t):
        return [a.copy() for a in tans]

    desc = {"kind": "linear", "rho0": r0, "tangents": tans}
    return StateFamily(rho0.dim, len(tans), evaluate, derivative, kind="linear", description=desc)


def family_constant(rho0, param_count=1):
    rho0 = density(rho0)
    r0 = np.array(rho0.matrix)
    n = rho0.dim
    return StateFamily(n, param_count, lambda t: r0.copy(),
                       lambda t: [np.zeros((n, n), complex) for _ in range(param_count)],
                       kind="constant", description={"kind": "constant", "rho0": r0,
                                                     "params": param_count})


@dataclass(frozen=True, eq=False)
class Purification:
    """``(sqrt(rho) V_A (x) V_B) sum_i |i>|i>`` stored as a length ``n**2`` vector."""

    vector: np.ndarray
    source: DensityMatrix
    gauge_a: np.ndarray
    gauge_b: np.ndarray

    @property
    def dim(self):
        return self.source.dim

    def lift(self, op):
        """Vector ``(op V_A (x) V_B)|alpha>`` for an operator ``op`` on system A."""
        return vec(np.asarray(op) @ self.gauge_a @ self.gauge_b.T)

    def reduced(self, keep="A"):
        return partial_trace(self.vector, self.dim, self.dim, keep)


def purify(rho, gauge_a=None, gauge_b=None, tol=1e-10):
    rho = density(rho)
    n = rho.dim
    va = np.eye(n, dtype=complex) if gauge_a is None else as_complex_matrix(gauge_a)
    vb = np.eye(n, dtype=complex) if gauge_b is None else as_complex_matrix(gauge_b)
    for name, v in (("V_A", va), ("V_B", vb)):
        if v.shape != (n, n):
            raise ShapeError(f"{name} has shape {v.shape}, expected {(n, n)}")
        if unitarity_residual(v) > tol:
            raise NonUnitaryGauge(f"{name} is not unitary (residual {unitarity_residual(v):.2e})")
    psi = vec(rho.sqrt @ va @ vb.T)
    return Purification(_readonly(psi), rho, _readonly(va), _readonly(vb))


def partial_trace(psi, n, m, keep="A"):
    """Reduced state of the pure state ``psi`` on ``C^n (x) C^m``."""
    psi = np.asarray(psi)
    if psi.shape != (n * m,):
        raise ShapeError(f"vector length {psi.shape} does not factor as {n}x{m}")
    x = psi.reshape(n, m)
    if keep == "A":
        return x @ dagger(x)
    if keep == "B":
        return x.T @ np.conj(x)
    raise ValueError("keep must be 'A' or 'B'")


def projective_differential(psi, dpsi, tol=1e-10):
    """Component of ``dpsi`` orthogonal to ``psi`` (angular variation, unit ``psi``)."""
    psi = np.asarray(psi, dtype=complex)
    dpsi = np.asarray(dpsi, dtype=complex)
    if psi.shape != dpsi.shape:
        raise ShapeError("psi and dpsi differ in shape")
    nrm = float(np.vdot(psi, psi).real)
    if abs(nrm - 1.0) > tol:
        raise NonUnitState(f"|psi|^2 = {nrm!r}")
    return dpsi / np.sqrt(nrm) - psi * np.vdot(psi, dpsi) / nrm**1.5


def random_density(dim, rank=None, seed=None):
    """Hilbert-Schmidt (Ginibre) random density matrix of the given rank."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise BadRank(f"rank {rank} not in [1, {dim}]")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    return DensityMatrix(m / np.trace(m).real)


def random_ginibre_family(dim, params=1, seed=None, spread=0.3):
    """Random full-rank :func:`family_ginibre_path` evaluated near ``theta = 0``."""
    rng = _rng(seed)

    def ginibre():
        return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

    g0 = ginibre()
    return family_ginibre_path(g0, [spread * ginibre() for _ in range(params)])


def classical_fisher(lam, dlam, tol=1e-12):
    """``sum (d lambda)^2 / lambda`` over entries with ``lambda > tol``."""
    lam = np.asarray(lam, dtype=float)
    dlam = np.asarray(dlam, dtype=float)
    keep = lam > tol
    return float(np.sum(dlam[keep] ** 2 / lam[keep]))
