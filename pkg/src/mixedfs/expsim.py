"""Generators on the purification space and simulated variance measurements.

The purified state is ``psi = vec(sqrt(rho))``. A generator ``H_AB`` with
``i H_AB psi = d psi`` reproduces the metric as its variance in ``psi``.
"""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateSampleWarning, NonUnitState, NormDrift, ShapeError
from .opspace import _readonly, as_complex_matrix, hermitian_eig, hermiticity_residual, left_super, right_super, vec
from .states import density

BLOCK_SHOTS = 1 << 16
MERGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GeneratorSolution:
    h_ab: np.ndarray
    psi: np.ndarray
    residual: float
    construction: str

    def expectation(self):
        return float(np.vdot(self.psi, self.h_ab @ self.psi).real)

    def variance(self):
        """Exact ``<H^2> - <H>^2`` in ``psi``."""
        hp = self.h_ab @ self.psi
        return float(np.vdot(hp, hp).real - self.expectation() ** 2)

    @property
    def hermiticity(self):
        return hermiticity_residual(self.h_ab)


def generator_commutator(rho, h_a):
    """``H_AB = L_H - R_H`` so that ``H_AB vec(sqrt(rho)) = vec([H, sqrt(rho)])``."""
    rho = density(rho)
    h = as_complex_matrix(h_a)
    if h.shape != rho.matrix.shape:
        raise ShapeError(f"H_A has shape {h.shape}, rho has {rho.matrix.shape}")
    h_ab = left_super(h) - right_super(h)
    psi = vec(rho.sqrt)
    target = vec(1j * (h @ rho.sqrt - rho.sqrt @ h))
    res = float(np.linalg.norm(1j * h_ab @ psi - target))
    return GeneratorSolution(_readonly(h_ab), _readonly(psi), res, "commutator")


def generator_rank2(psi, dpsi, tol=1e-9):
    """Minimal Hermitian generator on ``span{psi, dpsi}`` with ``i H psi = dpsi``."""
    psi = np.asarray(psi, complex)
    dpsi = np.asarray(dpsi, complex)
    if psi.shape != dpsi.shape or psi.ndim != 1:
        raise ShapeError("psi and dpsi must be vectors of equal length")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise NonUnitState("psi must be a unit vector")
    ov = np.vdot(psi, dpsi)
    if abs(ov.real) > tol:
        raise NormDrift(f"Re<psi|dpsi> = {ov.real:.3e}; the path does not preserve the norm")
    h = -1j * (np.outer(dpsi, psi.conj()) - np.outer(psi, dpsi.conj())) - ov.imag * np.outer(psi, psi.conj())
    res = float(np.linalg.norm(1j * h @ psi - dpsi))
    return GeneratorSolution(_readonly(h), _readonly(psi), res, "rank2")


def purified_tangent(rho, c):
    """``(vec(sqrt(rho)), vec(C))`` for a square-root derivative ``C``."""
    rho = density(rho)
    return vec(rho.sqrt), vec(np.asarray(c))


@dataclass
class EstimateRecord:
    exact_variance: float
    sample_variance: float
    stderr: float
    shots: int
    seed: int
    construction: str
    degenerate: bool = False

    def to_dict(self):
        return asdict(self)

    def within(self, k=3.0):
        return abs(self.sample_variance - self.exact_variance) <= k * self.stderr


def outcome_distribution(h, psi, merge_tol=MERGE_TOL):
    """Distinct eigenvalues of ``h`` (merged within ``merge_tol``) and their Born probabilities."""
    sd = hermitian_eig(h, tol=1e-10)
    amp = np.abs(sd.eigenvectors.conj().T @ psi) ** 2
    values, probs = [], []
    for lam, p in zip(sd.eigenvalues, amp):
        if values and abs(lam - values[-1]) <= merge_tol:
            probs[-1] += p
        else:
            values.append(float(lam))
            probs.append(float(p))
    probs = np.clip(np.array(probs), 0.0, None)
    return np.array(values), probs / probs.sum()


def simulate_variance(h, psi, shots, seed=0, construction="given"):
    """Sample projective measurements of ``h`` in ``psi``; estimate the variance.

    Outcomes are drawn in blocks of ``BLOCK_SHOTS`` with one RNG stream per
    block, so the estimate does not depend on how blocks are scheduled.
    The standard error is ``sqrt((m4 - m2^2) / shots)`` from the sample
    central moments.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    psi = np.asarray(psi, complex)
    values, probs = outcome_distribution(np.asarray(h, complex), psi)
    exact = float(probs @ values**2 - (probs @ values) ** 2)
    nblocks = math.ceil(shots / BLOCK_SHOTS)
    streams = np.random.SeedSequence(seed).spawn(nblocks)
    counts = np.zeros(values.size, dtype=np.int64)
    for b, ss in enumerate(streams):
        n = min(BLOCK_SHOTS, shots - b * BLOCK_SHOTS)
        counts += np.random.default_rng(ss).multinomial(n, probs)
    if shots == 1:
        warnings.warn("a single shot gives no variance information", DegenerateSampleWarning, stacklevel=2)
        return EstimateRecord(exact, 0.0, math.inf, 1, int(seed), construction, True)
    w = counts / shots
    mean = float(w @ values)
    m2 = float(w @ (values - mean) ** 2)
    m4 = float(w @ (values - mean) ** 4)
    sample_var = m2 * shots / (shots - 1)
    stderr = math.sqrt(max(m4 - m2 * m2, 0.0) / shots)
    return EstimateRecord(exact, sample_var, stderr, int(shots), int(seed), construction, False)
