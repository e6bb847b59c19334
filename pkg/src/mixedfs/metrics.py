"""Square-root derivatives and the metrics built from them.

Everything is evaluated in the eigenbasis of rho and reported through traces.
No overall normalization is imposed: for a pure family the tensor is twice the
pure-state Fubini-Study value, and for a commuting family it is a quarter of
the classical Fisher information.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import BadFamily, NonHermitianInput, RankDeficiencyWarning, ShapeError, SingularState
from .opspace import _readonly, as_complex_matrix, commutator, dagger, hermiticity_residual, unitarity_residual
from .states import density

SUPPORT_TOL = 1e-8
SINGULAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SqrtDerivative:
    """Hermitian ``C`` with ``sqrt(rho) C + C sqrt(rho) = d rho`` on the support.

    ``support`` is the boolean mask (eigenbasis of rho) of retained mode pairs;
    ``excluded`` lists dropped pairs whose derivative entry exceeded the tolerance.
    """

    matrix: np.ndarray
    support: np.ndarray
    excluded: tuple = ()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _tangent(d, n):
    d = as_complex_matrix(d)
    if d.shape != (n, n):
        raise ShapeError(f"tangent of shape {d.shape} for a {n}-dimensional state")
    res = hermiticity_residual(d)
    if res > 1e-9 * max(1.0, float(np.max(np.abs(d)))):
        raise NonHermitianInput(f"tangent is not Hermitian (residual {res:.2e})")
    return d


def _finish(rho, d_eig, denom, mask, warn_tol, warn):
    excluded = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(~mask & (np.abs(d_eig) > warn_tol))))
    if excluded and warn:
        warnings.warn(RankDeficiencyWarning(excluded), stacklevel=3)
    with np.errstate(divide="ignore", invalid="ignore"):
        c_eig = np.where(mask, d_eig / np.where(mask, denom, 1.0), 0.0)
    c = rho.spectral.from_eigenbasis(c_eig)
    return SqrtDerivative(_readonly(0.5 * (c + dagger(c))), _readonly(mask), excluded)


def _sqrt_eigs(rho):
    return np.sqrt(np.clip(rho.eigenvalues, 0.0, None))


def sqrt_derivative(rho, drho, support_tol=SUPPORT_TOL, warn=True):
    """Square-root derivative ``C = d sqrt(rho)`` for one tangent ``drho``.

    In the eigenbasis ``C_ij = drho_ij / (sqrt(l_i) + sqrt(l_j))`` for pairs with
    ``sqrt(l_i) + sqrt(l_j) > support_tol``. Excluded pairs carrying a derivative
    larger than ``support_tol`` raise a :class:`RankDeficiencyWarning`.
    """
    rho = density(rho)
    d_eig = rho.spectral.to_eigenbasis(_tangent(drho, rho.dim))
    s = _sqrt_eigs(rho)
    denom = s[:, None] + s[None, :]
    return _finish(rho, d_eig, denom, denom > support_tol, support_tol, warn)


def generalized_sqrt_derivative(rho, drho, f, support_tol=SUPPORT_TOL, warn=True):
    """``C_ij = drho_ij / (f(sqrt(l_i / l_j)) sqrt(l_j))`` for a normalized function ``f``.

    ``f(t) = (1 + t)/2`` gives exactly twice :func:`sqrt_derivative`.
    """
    from .errors import DomainError

    if abs(float(f(1.0)) - 1.0) > 1e-12:
        raise ValueError("f must satisfy f(1) = 1")
    rho = density(rho)
    d_eig = rho.spectral.to_eigenbasis(_tangent(drho, rho.dim))
    s = _sqrt_eigs(rho)
    pos = s > support_tol
    cols = np.broadcast_to(pos[None, :], (rho.dim, rho.dim))
    ratio = np.where(cols, s[:, None] / np.where(cols, s[None, :], 1.0), 1.0)
    with np.errstate(all="ignore"):
        fv = np.asarray(f(ratio), dtype=float)
    valid = np.isfinite(fv) & (fv > 0)
    bad = cols & pos[:, None] & ~valid
    if np.any(bad):
        raise DomainError(float(ratio[bad][0]), f)
    # a zero row eigenvalue may put f(0) outside the support
    mask = cols & valid
    return _finish(rho, d_eig, fv * s[None, :], mask, support_tol, warn)


def sqrt_derivative_sylvester(rho, drho):
    """Square-root derivative from the Sylvester equation solved on vec space.

    Independent of :func:`sqrt_derivative`: solves
    ``(S (x) I + I (x) S^T) vec(C) = vec(drho)`` by least squares with
    ``S = sqrt(rho)``.
    """
    rho = density(rho)
    n = rho.dim
    s = rho.sqrt
    op = np.kron(s, np.eye(n)) + np.kron(np.eye(n), s.T)
    c, *_ = np.linalg.lstsq(op, np.asarray(drho, complex).reshape(-1), rcond=1e-14)
    c = c.reshape(n, n)
    return 0.5 * (c + dagger(c))


@dataclass(frozen=True, eq=False)
class QGTensor:
    """Quantum geometric tensor ``g = gamma + i sigma`` (``d x d``, Hermitian)."""

    g: np.ndarray
    warnings: tuple = ()

    @property
    def gamma(self):
        return 0.5 * (self.g.real + self.g.real.T)

    @property
    def sigma(self):
        return 0.5 * (self.g.imag - self.g.imag.T)

    @property
    def dim(self):
        return self.g.shape[0]

    def contract(self, dtheta):
        """``ds^2 = sum gamma_ij dtheta_i dtheta_j``."""
        v = np.asarray(dtheta, dtype=float)
        return float(v @ self.gamma @ v)


def _as_list(cs):
    if isinstance(cs, (SqrtDerivative, np.ndarray)) and np.ndim(cs) == 2:
        return [np.asarray(cs)]
    return [np.asarray(c) for c in cs]


def qgt_from_sqrt(rho, cs):
    """``g_ij = Tr(C_i^dag C_j) - Tr(sqrt(rho) C_i^dag) Tr(sqrt(rho) C_j)``."""
    rho = density(rho)
    cs = _as_list(cs)
    s = rho.sqrt
    d = len(cs)
    g = np.empty((d, d), dtype=complex)
    tr_s = [np.trace(s @ c) for c in cs]
    for i in range(d):
        for j in range(d):
            g[i, j] = np.vdot(cs[i], cs[j]) - np.conj(tr_s[i]) * tr_s[j]
    return g


def _family_sqrt(family, theta, support_tol=SUPPORT_TOL):
    rho = family.rho(theta)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankDeficiencyWarning)
        cs = [sqrt_derivative(rho, d, support_tol) for d in family.derivatives(theta)]
    msgs = tuple(str(w.message) for w in caught if issubclass(w.category, RankDeficiencyWarning))
    for m in msgs:
        warnings.warn(m, RankDeficiencyWarning, stacklevel=3)
    return rho, cs, msgs


def fs_qgt(family, theta):
    """Mixed-state Fubini-Study quantum geometric tensor of a family at ``theta``."""
    rho, cs, msgs = _family_sqrt(family, theta)
    return QGTensor(_readonly(qgt_from_sqrt(rho, cs)), msgs)


def fs_metric(rho, a, b=None):
    """Real metric ``gamma_rho(A, B)`` with tangents realized by square-root derivatives."""
    ca = sqrt_derivative(rho, a, warn=False).matrix
    cb = ca if b is None else sqrt_derivative(rho, b, warn=False).matrix
    return float(qgt_from_sqrt(rho, [ca, cb])[0, 1].real)


def dynamical_phase(rho, cs):
    """``i Tr(C_i sqrt(rho))`` for each square-root derivative."""
    rho = density(rho)
    return np.array([1j * np.trace(np.asarray(c) @ rho.sqrt) for c in _as_list(cs)])


def metric_unitary(rho, h):
    """``-Tr([sqrt(rho), H]^2)``, the metric along ``exp(iHt)``."""
    rho = density(rho)
    h = as_complex_matrix(h)
    if h.shape != rho.matrix.shape:
        raise ShapeError(f"H has shape {h.shape}, rho has {rho.matrix.shape}")
    k = commutator(rho.sqrt, h)
    return float(-np.trace(k @ k).real)


def metric_cptp_kraus(rho, kraus, kraus_dot, tp_tol=1e-8):
    """Literal Kraus-form metric with ``X_i = dA_i S A_i^dag + A_i S dA_i^dag``, ``S = sqrt(rho)``:
    ``sum_ij Tr(X_i X_j) - |sum_i Tr(S X_i)|^2``.
    """
    rho = density(rho)
    ks = [as_complex_matrix(a) for a in kraus]
    kd = [as_complex_matrix(a) for a in kraus_dot]
    if len(ks) != len(kd) or not ks:
        raise ShapeError("need matching nonempty Kraus and derivative lists")
    if any(a.shape != rho.matrix.shape for a in ks + kd):
        raise ShapeError("Kraus operator shapes differ from rho")
    tp = sum(dagger(a) @ a for a in ks)
    if np.max(np.abs(tp - np.eye(rho.dim))) > tp_tol:
        raise ValueError("Kraus operators are not trace preserving")
    s = rho.sqrt
    xs = [d @ s @ dagger(a) + a @ s @ dagger(d) for a, d in zip(ks, kd)]
    first = sum(np.trace(xi @ xj) for xi in xs for xj in xs)
    second = sum(np.trace(s @ x) for x in xs)
    return float((first - abs(second) ** 2).real)


def env_block(op, nu, n):
    """``<nu| op |nu>`` over the environment factor of ``C^n (x) C^m``."""
    nu = np.asarray(nu, complex)
    m = nu.shape[0]
    op = as_complex_matrix(op)
    if op.shape != (n * m, n * m):
        raise ShapeError(f"operator of shape {op.shape} does not factor as {n}x{m}")
    return np.einsum("e,aebf,f->ab", nu.conj(), op.reshape(n, m, n, m), nu)


def metric_cptp_dilation(rho, h_ab, nu):
    """``2 Tr(<H^2> rho - <H> sqrt(rho) <H> sqrt(rho))`` with ``<X> = <nu|X|nu>``."""
    rho = density(rho)
    nu = np.asarray(nu, complex)
    if abs(np.vdot(nu, nu).real - 1.0) > 1e-10:
        raise ValueError("environment state must be a unit vector")
    h_ab = as_complex_matrix(h_ab)
    h1 = env_block(h_ab, nu, rho.dim)
    h2 = env_block(h_ab @ h_ab, nu, rho.dim)
    s = rho.sqrt
    return float(2.0 * np.trace(h2 @ rho.matrix - h1 @ s @ h1 @ s).real)


# -- alpha metrics --------------------------------------------------------


def _check_alpha(rho, alpha):
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if rho.min_eigenvalue < SINGULAR_TOL:
        raise SingularState(f"min eigenvalue {rho.min_eigenvalue:.3e} < {SINGULAR_TOL}; alpha metrics "
                            "need a positive definite state")


def _alpha_pieces(rho, cs, alpha):
    lam = rho.eigenvalues
    tr_a = float(np.sum(lam**alpha))
    p1 = rho.spectral.apply(lam ** (alpha - 1.0))
    ph = rho.spectral.apply(lam ** (alpha - 0.5))
    first = np.array([[np.trace(p1 @ dagger(ci) @ cj) for cj in cs] for ci in cs])
    t_h = np.array([np.trace(ph @ c) for c in cs])
    t_s = np.array([np.trace(rho.sqrt @ c) for c in cs])
    return tr_a, first, t_h, t_s


def alpha_G_from_sqrt(rho, cs, alpha):
    rho = density(rho)
    _check_alpha(rho, alpha)
    cs = _as_list(cs)
    tr_a, first, t_h, _ = _alpha_pieces(rho, cs, alpha)
    # Tr(rho^(a-1/2) C^dag) = conj(Tr(rho^(a-1/2) C))
    return first / tr_a - np.outer(np.conj(t_h), t_h) / tr_a**2


def alpha_Gtilde_from_sqrt(rho, cs, alpha):
    rho = density(rho)
    _check_alpha(rho, alpha)
    cs = _as_list(cs)
    tr_a, first, t_h, t_s = _alpha_pieces(rho, cs, alpha)
    return (first / tr_a
            - np.outer(np.conj(t_h), t_s) / tr_a
            - np.outer(np.conj(t_s), t_h) / tr_a
            + np.outer(np.conj(t_s), t_s))


def alpha_qgt_G(family, theta, alpha):
    rho, cs, msgs = _family_sqrt(family, theta)
    return QGTensor(_readonly(alpha_G_from_sqrt(rho, cs, alpha)), msgs)


def alpha_qgt_Gtilde(family, theta, alpha):
    rho, cs, msgs = _family_sqrt(family, theta)
    return QGTensor(_readonly(alpha_Gtilde_from_sqrt(rho, cs, alpha)), msgs)


def alpha_dynamical_phase(rho, cs, alpha):
    """``i Tr(rho^(alpha - 1/2) C_i)``."""
    rho = density(rho)
    _check_alpha(rho, alpha)
    ph = rho.power(alpha - 0.5)
    return np.array([1j * np.trace(ph @ np.asarray(c)) for c in _as_list(cs)])


def alpha_metric(rho, a, alpha, tilde=True):
    """``G~(alpha)`` (or ``G(alpha)``) contracted on a single tangent ``A``."""
    c = sqrt_derivative(rho, a, warn=False).matrix
    fn = alpha_Gtilde_from_sqrt if tilde else alpha_G_from_sqrt
    return float(fn(rho, [c], alpha)[0, 0].real)


# -- baselines ------------------------------------------------------------


def sld_qfi_state(rho, drhos, tol=1e-12):
    """SLD Fisher information matrix ``sum 2 Re(dA_kl dB_lk) / (l_k + l_l)``."""
    rho = density(rho)
    lam = np.clip(rho.eigenvalues, 0.0, None)
    ds = [rho.spectral.to_eigenbasis(_tangent(d, rho.dim)) for d in drhos]
    denom = lam[:, None] + lam[None, :]
    mask = denom > tol
    skipped = [(int(i), int(j)) for i, j in zip(*np.nonzero(~mask))
               if any(abs(d[i, j]) > 1e-8 for d in ds)]
    if skipped:
        warnings.warn(RankDeficiencyWarning(skipped), stacklevel=2)
    w = np.where(mask, 2.0 / np.where(mask, denom, 1.0), 0.0)
    k = len(ds)
    f = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            f[i, j] = float(np.sum(w * (ds[i] * ds[j].T)).real)
    return f


def sld_qfi(family, theta, tol=1e-12):
    return sld_qfi_state(family.rho(theta), family.derivatives(theta), tol)


def petz_metric(f, rho, a, b):
    """``sum conj(A_kl) B_kl / (l_l f(l_k / l_l))`` in the eigenbasis of rho."""
    rho = density(rho)
    if rho.min_eigenvalue < SINGULAR_TOL:
        raise SingularState("Petz metrics need a positive definite state")
    lam = rho.eigenvalues
    ae = rho.spectral.to_eigenbasis(as_complex_matrix(a))
    be = rho.spectral.to_eigenbasis(as_complex_matrix(b))
    denom = lam[None, :] * np.asarray(f(lam[:, None] / lam[None, :]), dtype=float)
    return complex(np.sum(np.conj(ae) * be / denom))


def classical_fisher_projective(family, theta, basis, tol=1e-12):
    """Classical Fisher information of measuring ``rho(theta)`` in the columns of ``basis``."""
    u = as_complex_matrix(basis)
    if unitarity_residual(u) > 1e-9:
        raise ValueError("measurement basis must be unitary")
    if family.param_count != 1:
        raise BadFamily("projective Fisher information implemented for one parameter")
    rho = family.rho(theta)
    (d,) = family.derivatives(theta)
    p = np.real(np.einsum("ka,kl,la->a", u.conj(), rho.matrix, u))
    dp = np.real(np.einsum("ka,kl,la->a", u.conj(), d, u))
    keep = p > tol
    return float(np.sum(dp[keep] ** 2 / p[keep]))


# -- reports --------------------------------------------------------------


@dataclass
class MetricReport:
    theta: List[float]
    tensor: QGTensor
    dynamical_phase: np.ndarray
    dtheta: List[float]
    ds2: float
    cr_bound: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self):
        ph = np.asarray(self.dynamical_phase)
        return {
            "theta": [float(x) for x in self.theta],
            "gamma": self.tensor.gamma.tolist(),
            "sigma": self.tensor.sigma.tolist(),
            "dyn_phase": {"re": ph.real.tolist(), "im": ph.imag.tolist()},
            "ds2": self.ds2,
            "cr_bound": self.cr_bound,
            "warnings": list(self.warnings),
        }


def inverse_or_inf(x, tol=0.0):
    return math.inf if x <= tol else 1.0 / x


def metric_report(family, theta, dtheta=None):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    rho, cs, msgs = _family_sqrt(family, theta)
    tensor = QGTensor(_readonly(qgt_from_sqrt(rho, cs)), msgs)
    dth = np.zeros(family.param_count) if dtheta is None else np.asarray(dtheta, float)
    if dtheta is None:
        dth[0] = 1.0
    ds2 = tensor.contract(dth)
    return MetricReport(theta.tolist(), tensor, dynamical_phase(rho, cs), dth.tolist(), ds2,
                        inverse_or_inf(ds2, 1e-15), list(msgs))


__all__ = [
    "SqrtDerivative", "QGTensor", "MetricReport", "sqrt_derivative", "generalized_sqrt_derivative",
    "sqrt_derivative_sylvester", "qgt_from_sqrt", "fs_qgt", "fs_metric", "dynamical_phase",
    "metric_unitary", "metric_cptp_kraus", "metric_cptp_dilation", "env_block", "alpha_qgt_G",
    "alpha_qgt_Gtilde", "alpha_G_from_sqrt", "alpha_Gtilde_from_sqrt", "alpha_dynamical_phase",
    "alpha_metric", "sld_qfi", "sld_qfi_state", "petz_metric", "classical_fisher_projective",
    "metric_report",
]
