"""Operator sigma-means, the operator-function catalogue and superoperator monotonicity checks.

Order relations between Hermitian matrices are decided by the smallest
eigenvalue of the difference, with an absolute slack of ``SLACK``.
Every scan draws trial ``k`` from ``default_rng([seed, k])`` so results do
not depend on evaluation order.
"""

from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ShapeError, SingularState, SizeLimit
from .opspace import (
    dagger,
    hermitian_eig,
    hermitian_part,
    kraus_superop,
    matrix_function,
    min_eig,
)

SLACK = 1e-8
MAX_SUPEROP_DIM = 64  # n <= 8

OPERATOR_MONOTONE = "operator-monotone"
OPERATOR_CONVEX = "operator-convex"
OPERATOR_CONCAVE = "operator-concave"
UNTAGGED = "untagged"


@dataclass(frozen=True)
class OperatorFunction:
    """Scalar function on the positive reals with a declared operator class.

    The class tag is metadata; the check operations in this module verify it
    empirically.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    tag: str = UNTAGGED

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    @property
    def normalized(self):
        return abs(float(self(1.0)) - 1.0) <= 1e-12

    def positive_on_grid(self, lo=1e-3, hi=1e3, points=61):
        grid = np.geomspace(lo, hi, points)
        vals = self(grid)
        return bool(np.all(np.isfinite(vals)) and np.all(vals > 0))


ARITHMETIC = OperatorFunction("arithmetic", lambda t: (1.0 + t) / 2.0, OPERATOR_MONOTONE)
GEOMETRIC = OperatorFunction("geometric", np.sqrt, OPERATOR_MONOTONE)
HARMONIC = OperatorFunction("harmonic", lambda t: 2.0 * t / (1.0 + t), OPERATOR_MONOTONE)
WIGNER_YANASE = OperatorFunction("wigner_yanase", lambda t: ((1.0 + np.sqrt(t)) / 2.0) ** 2,
                                 OPERATOR_MONOTONE)
SQUARE = OperatorFunction("square", lambda t: t**2, OPERATOR_CONVEX)
CONSTANT_ONE = OperatorFunction("one", lambda t: np.ones_like(t), UNTAGGED)

CATALOGUE = {f.name: f for f in (ARITHMETIC, GEOMETRIC, HARMONIC, WIGNER_YANASE, SQUARE, CONSTANT_ONE)}
MEAN_CATALOGUE = (ARITHMETIC, GEOMETRIC, HARMONIC, WIGNER_YANASE)


def get_function(name):
    try:
        return CATALOGUE[name]
    except KeyError:
        raise ValueError(f"unknown operator function {name!r}; known: {sorted(CATALOGUE)}") from None


def default_direction(f):
    """``leq`` (standard operator means) for operator-monotone tags, ``geq`` otherwise."""
    return "leq" if f.tag in (OPERATOR_MONOTONE, OPERATOR_CONCAVE) else "geq"


def _require_positive_definite(a, what="A", tol=1e-12):
    sd = hermitian_eig(a)
    scale = max(1.0, float(np.max(np.abs(sd.eigenvalues))))
    if sd.eigenvalues[0] <= tol * scale:
        raise SingularState(f"{what} is not positive definite (min eigenvalue {sd.eigenvalues[0]:.3e})")
    return sd


def sigma_mean(a, b, f):
    """``A^(1/2) f(A^(-1/2) B A^(-1/2)) A^(1/2)`` for positive definite ``A``, PSD ``B``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeError(f"shapes differ: {a.shape} vs {b.shape}")
    sd = _require_positive_definite(a)
    lam = sd.eigenvalues
    a_half = sd.apply(np.sqrt(lam))
    a_mhalf = sd.apply(1.0 / np.sqrt(lam))
    x = hermitian_part(a_mhalf @ b @ a_mhalf)
    return hermitian_part(a_half @ matrix_function(x, f) @ a_half)


def recover_scalar(mean, t, dim=2):
    """Read ``f(t) = I sigma (t I)`` back from a mean.

    ``mean`` is an :class:`OperatorFunction` or a binary callable ``(A, B) -> A sigma B``.
    """
    eye = np.eye(dim)
    m = sigma_mean(eye, t * eye, mean) if isinstance(mean, OperatorFunction) else mean(eye, t * eye)
    return float(np.real(m[0, 0]))


@dataclass
class MeanCheckReport:
    trials: int
    violations: int
    worst_margin: float
    seed: int
    function: str
    direction: str
    slack: float = SLACK
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _random_pd(rng, n, floor=0.1):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ dagger(g) / n + floor * np.eye(n)


def _random_psd(rng, n, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * g @ dagger(g) / n


def _random_contraction(rng, n, rank=None):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u, s, vh = np.linalg.svd(g)
    s = rng.uniform(0.2, 1.0, size=n)
    if rank is not None:
        s[rank:] = 0.0
    return (u * s) @ vh


def _order_margin(lhs, rhs, direction):
    """Smallest eigenvalue certifying ``lhs <= rhs`` (leq) or ``lhs >= rhs`` (geq)."""
    diff = rhs - lhs if direction == "leq" else lhs - rhs
    return min_eig(diff)


def _check_direction(direction):
    if direction not in ("leq", "geq"):
        raise ValueError("direction must be 'leq' or 'geq'")


def _regularized_mean(a, b, f, eps):
    n = a.shape[0]
    return sigma_mean(a + eps * np.eye(n), b + eps * np.eye(n), f)


def check_transformer(f, direction=None, trials=500, seed=0, dim=3, c=None, a=None, b=None):
    """Scan ``C^dagger (A s B) C`` against ``(C^dagger A C) s (C^dagger B C)``.

    Even trials use an invertible contraction ``C`` (where both sides must be
    equal), odd trials a rank-deficient one. Singular conjugated arguments are
    regularized by ``1e-10 I``; ``C`` shares its kernel between both arguments,
    so the error is of that order. Fixed ``a``, ``b`` or ``c`` override sampling.
    """
    direction = direction or default_direction(f)
    _check_direction(direction)
    violations = 0
    worst = np.inf
    eq_fail = 0
    eq_worst = 0.0
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        aa = _random_pd(rng, dim) if a is None else np.asarray(a, complex)
        bb = _random_psd(rng, dim) if b is None else np.asarray(b, complex)
        invertible = k % 2 == 0
        if c is not None:
            cc = np.asarray(c, complex)
            invertible = abs(np.linalg.det(cc)) > 1e-10
        else:
            cc = _random_contraction(rng, dim, None if invertible else int(rng.integers(1, dim)))
        lhs = dagger(cc) @ sigma_mean(aa, bb, f) @ cc
        rhs = _regularized_mean(dagger(cc) @ aa @ cc, dagger(cc) @ bb @ cc, f, 0.0 if invertible else 1e-10)
        margin = _order_margin(lhs, rhs, direction)
        worst = min(worst, margin)
        if margin < -SLACK:
            violations += 1
        if invertible:
            gap = float(np.max(np.abs(hermitian_eig(hermitian_part(lhs - rhs), tol=np.inf).eigenvalues)))
            eq_worst = max(eq_worst, gap)
            if gap > SLACK:
                eq_fail += 1
    return MeanCheckReport(trials, violations, float(worst), seed, f.name, direction,
                           details={"equality_failures": eq_fail, "equality_worst": eq_worst})


def check_mean_monotone(f, trials=500, seed=0, direction=None, dim=3, zero_increment=False):
    """Scan ``A s B`` against ``A' s B'`` for ``A <= A'``, ``B <= B'``.

    ``leq`` tests ``A s B <= A' s B'`` (standard operator means), ``geq`` the
    reversed order.
    """
    direction = direction or default_direction(f)
    _check_direction(direction)
    violations = 0
    worst = np.inf
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        a = _random_pd(rng, dim)
        b = _random_pd(rng, dim)
        if zero_increment:
            a2, b2 = a, b
        else:
            a2 = a + _random_psd(rng, dim, rng.uniform(0.05, 1.0))
            b2 = b + _random_psd(rng, dim, rng.uniform(0.05, 1.0))
        margin = _order_margin(sigma_mean(a, b, f), sigma_mean(a2, b2, f), direction)
        worst = min(worst, margin)
        if margin < -SLACK:
            violations += 1
    return MeanCheckReport(trials, violations, float(worst), seed, f.name, direction)


def direction_survey(f, trials=200, seed=0):
    """Run both order directions of both checks; returns ``{check: {direction: report}}``."""
    return {
        "monotone": {d: check_mean_monotone(f, trials, seed, d) for d in ("leq", "geq")},
        "transformer": {d: check_transformer(f, d, trials, seed) for d in ("leq", "geq")},
    }


# -- superoperators -------------------------------------------------------


def _check_superop_size(*ks):
    for k in ks:
        if k.shape[0] > MAX_SUPEROP_DIM:
            raise SizeLimit(f"superoperator dimension {k.shape[0]} exceeds {MAX_SUPEROP_DIM}")


@dataclass(frozen=True, eq=False)
class CombinedSuperOperator:
    """``K = K1 s_f K2`` and, when a second function is given, ``K1^2 s_tau K2^2``.

    ``joint_residual`` measures how far ``K @ K`` is from the ``tau`` combination.
    """

    k: np.ndarray
    k_squared_tau: Optional[np.ndarray] = None
    joint_residual: Optional[float] = None


def combine_superops(k1, k2, f, tau=None):
    k1 = np.asarray(k1, complex)
    k2 = np.asarray(k2, complex)
    _check_superop_size(k1, k2)
    k = sigma_mean(k1, k2, f)
    if tau is None:
        return CombinedSuperOperator(k)
    ksq = sigma_mean(k1 @ k1, k2 @ k2, tau)
    return CombinedSuperOperator(k, ksq, float(np.max(np.abs(k @ k - ksq))))


def _eigen_superop(rho, values_fn):
    """Superoperator diagonal on ``|k><l|`` (eigenbasis of rho) with ``values_fn(lam_k, lam_l)``."""
    from .states import density

    rho = density(rho)
    lam = np.clip(rho.eigenvalues, 0.0, None)
    u = rho.spectral.eigenvectors
    w = np.kron(u, np.conj(u))
    vals = values_fn(lam[:, None], lam[None, :]).reshape(-1)
    return (w * vals) @ dagger(w)


def sqrt_superop(f):
    """Builder ``rho -> f(L R^-1) R`` with ``L``, ``R`` left/right multiplication by sqrt(rho).

    The square-root derivative of this class is ``C = K^-1(d rho)``.
    """

    def build(rho):
        def vals(x, y):
            sx, sy = np.sqrt(x), np.sqrt(y)
            with np.errstate(divide="ignore", invalid="ignore"):
                return f(sx / sy) * sy

        return _eigen_superop(rho, vals)

    build.__name__ = f"sqrt_superop[{f.name}]"
    return build


def log_superop(f):
    """Builder ``rho -> f(L R^-1) R`` with ``L``, ``R`` left/right multiplication by rho."""

    def build(rho):
        def vals(x, y):
            with np.errstate(divide="ignore", invalid="ignore"):
                return f(x / y) * y

        return _eigen_superop(rho, vals)

    build.__name__ = f"log_superop[{f.name}]"
    return build


def identity_superop(rho):
    from .states import density

    n = density(rho).dim
    return np.eye(n * n, dtype=complex)


@dataclass(frozen=True)
class ConditionMargins:
    """Smallest-eigenvalue margins of the monotonicity conditions for one (channel, state).

    ``square``: ``K_{E(rho)}^2 - E K_rho^2 E^dagger`` (>= 0 means satisfied).
    ``inverse_square``: ``K_rho^-2 - E^dagger K_{E(rho)}^-2 E``.
    ``inverse``: ``E^dagger K_{E(rho)}^-1 E - K_rho^-1`` for ``geq``, negated for ``leq``.
    """

    square: float
    inverse_square: float
    inverse: float
    direction: str

    def satisfied(self, slack=SLACK):
        return self.square >= -slack and self.inverse >= -slack


def _inv_psd(k):
    sd = _require_positive_definite(k, "K")
    return sd.apply(1.0 / sd.eigenvalues)


def check_monotonicity_condition(k_builder, ch, rho, direction="geq"):
    from .channels import apply
    from .states import density

    _check_direction(direction)
    rho = density(rho)
    if ch.in_dim != ch.out_dim or ch.in_dim != rho.dim:
        raise ShapeError("channel and state dimensions differ")
    e = kraus_superop(ch.kraus)
    ed = dagger(e)
    k_in = np.asarray(k_builder(rho), complex)
    k_out = np.asarray(k_builder(apply(ch, rho)), complex)
    _check_superop_size(k_in, k_out)
    ki_in, ki_out = _inv_psd(k_in), _inv_psd(k_out)
    square = min_eig(k_out @ k_out - e @ k_in @ k_in @ ed)
    inv_sq = min_eig(ki_in @ ki_in - ed @ ki_out @ ki_out @ e)
    inv_diff = ed @ ki_out @ e - ki_in
    inverse = min_eig(inv_diff if direction == "geq" else -inv_diff)
    return ConditionMargins(square, inv_sq, inverse, direction)


def scan_monotonicity_condition(k_builder, trials=200, seed=0, dim=2, direction="geq", max_kraus=4):
    """Aggregate :func:`check_monotonicity_condition` over random qubit channels and states."""
    from .channels import random_channel
    from .states import random_density

    violations = 0
    worst = np.inf
    sq_viol = 0
    inv_viol = 0
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        rho = random_density(dim, dim, rng)
        ch = random_channel(dim, int(rng.integers(1, max_kraus + 1)), rng)
        m = check_monotonicity_condition(k_builder, ch, rho, direction)
        worst = min(worst, m.square)
        sq_viol += m.square < -SLACK
        inv_viol += m.inverse < -SLACK
        violations += not m.satisfied()
    name = getattr(k_builder, "__name__", "K")
    return MeanCheckReport(trials, int(violations), float(worst), seed, name, direction,
                           details={"square_violations": int(sq_viol), "inverse_violations": int(inv_viol)})


def theorem_reproduction(k1_builder, k2_builder, f, channels, rho, direction="geq", tau=None):
    """Per channel: do ``K1``, ``K2`` and ``K1 s_f K2`` satisfy the monotonicity condition?"""
    rows = []

    def combined(r):
        return combine_superops(k1_builder(r), k2_builder(r), f).k

    for i, ch in enumerate(channels):
        m1 = check_monotonicity_condition(k1_builder, ch, rho, direction)
        m2 = check_monotonicity_condition(k2_builder, ch, rho, direction)
        mc = check_monotonicity_condition(combined, ch, rho, direction)
        row = {"channel": i, "k1": m1.satisfied(), "k2": m2.satisfied(), "combined": mc.satisfied(),
               "combined_square_margin": mc.square, "combined_inverse_margin": mc.inverse}
        if tau is not None:
            from .states import density

            r = density(rho)
            row["joint_residual"] = combine_superops(k1_builder(r), k2_builder(r), f, tau).joint_residual
        rows.append(row)
    return rows


@dataclass(frozen=True, eq=False)
class SqrtLogPair:
    """Square-root superoperator ``K_s`` paired with the logarithmic ``K_l`` it came from."""

    k_sqrt: np.ndarray
    k_log: np.ndarray

    def fisher_sqrt(self, a):
        """``<C, C>`` with ``C = K_s^-1 (A)``."""
        c = np.linalg.solve(self.k_sqrt, np.asarray(a, complex).reshape(-1))
        return float(np.vdot(c, c).real)

    def fisher_log(self, a):
        """``<A, K_l^-1 (A)>``."""
        v = np.asarray(a, complex).reshape(-1)
        return float(np.vdot(v, np.linalg.solve(self.k_log, v)).real)


def sqrt_from_log_superop(g, rho):
    """Build ``K_s = sqrt(g(L^2 R^-2) R^2)`` and ``K_l = g(L_l R_l^-1) R_l`` on vec space.

    ``L``, ``R`` multiply by sqrt(rho), ``L_l``, ``R_l`` by rho. Both are built
    by matrix functions of the commuting superoperators (not in rho's eigenbasis).
    """
    from .opspace import left_super, right_super
    from .states import density

    rho = density(rho)
    if rho.dim**2 > MAX_SUPEROP_DIM:
        raise SizeLimit(f"dimension {rho.dim} too large for superoperator calculus")
    if rho.min_eigenvalue <= 1e-12:
        raise SingularState("rho must be positive definite")
    s = rho.sqrt
    s_inv = rho.spectral.apply(rho.eigenvalues**-0.5)
    l_s, r_s, r_s_inv = left_super(s), right_super(s), right_super(s_inv)
    ratio = hermitian_part(l_s @ l_s @ r_s_inv @ r_s_inv)
    k_s = matrix_function(hermitian_part(matrix_function(ratio, g) @ r_s @ r_s), "sqrt")
    l_l, r_l = left_super(rho.matrix), right_super(rho.matrix)
    r_l_inv = right_super(rho.spectral.apply(1.0 / rho.eigenvalues))
    k_l = hermitian_part(matrix_function(hermitian_part(l_l @ r_l_inv), g) @ r_l)
    return SqrtLogPair(hermitian_part(k_s), k_l)
