import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedfs import expsim
from mixedfs.errors import DegenerateSampleWarning, NonUnitState, NormDrift, ShapeError
from mixedfs.expsim import (
    EstimateRecord,
    generator_commutator,
    generator_rank2,
    outcome_distribution,
    purified_tangent,
    simulate_variance,
)
from mixedfs.metrics import fs_metric, metric_unitary, sqrt_derivative
from mixedfs.states import random_density, random_ginibre_family

from conftest import SX, SZ, random_hermitian_np, seeds

HAND = 2 - np.sqrt(3)


class TestGenerators:
    def test_commutator_hand(self):
        sol = generator_commutator(np.diag([0.75, 0.25]), SX)
        assert sol.variance() == pytest.approx(HAND, abs=1e-14)
        assert sol.expectation() == pytest.approx(0.0, abs=1e-15)
        assert sol.residual <= 1e-14 and sol.hermiticity <= 1e-15

    @given(seed=seeds, n=st.integers(2, 4))
    def test_commutator_variance_is_metric(self, seed, n):
        rng = np.random.default_rng(seed)
        rho = random_density(n, int(rng.integers(1, n + 1)), rng)
        h = random_hermitian_np(rng, n)
        assert generator_commutator(rho, h).variance() == pytest.approx(metric_unitary(rho, h), abs=1e-9)

    def test_commutator_shape(self):
        with pytest.raises(ShapeError):
            generator_commutator(np.eye(2) / 2, np.eye(3))

    @given(seed=seeds, n=st.integers(2, 4))
    def test_rank2_variance_is_metric(self, seed, n):
        fam = random_ginibre_family(n, 1, seed)
        rho = fam.rho([0.0])
        (d,) = fam.derivatives([0.0])
        psi, dpsi = purified_tangent(rho, sqrt_derivative(rho, d).matrix)
        sol = generator_rank2(psi, dpsi)
        assert sol.residual <= 1e-10 and sol.hermiticity <= 1e-12
        assert sol.variance() == pytest.approx(fs_metric(rho, d), abs=1e-9)

    def test_rank2_hand(self):
        c = 0.7
        sol = generator_rank2(np.array([1.0, 0.0]), np.array([0.0, c]))
        np.testing.assert_allclose(sol.h_ab, c * np.array([[0, 1j], [-1j, 0]]), atol=1e-15)

    def test_rank2_with_imaginary_overlap(self):
        psi = np.array([1.0, 0.0], complex)
        dpsi = np.array([0.3j, 0.5])
        sol = generator_rank2(psi, dpsi)
        np.testing.assert_allclose(1j * sol.h_ab @ psi, dpsi, atol=1e-15)
        assert sol.variance() == pytest.approx(0.25, abs=1e-15)

    def test_rank2_norm_drift(self):
        with pytest.raises(NormDrift):
            generator_rank2(np.array([1.0, 0.0]), np.array([0.1, 0.0]))

    def test_rank2_non_unit(self):
        with pytest.raises(NonUnitState):
            generator_rank2(np.array([2.0, 0.0]), np.array([0.0, 1.0]))

    def test_rank2_shape(self):
        with pytest.raises(ShapeError):
            generator_rank2(np.array([1.0, 0.0]), np.array([0.0, 1.0, 0.0]))


class TestOutcomes:
    def test_merges_degenerate_eigenvalues(self):
        vals, probs = outcome_distribution(np.diag([1.0, 1.0, -1.0]), np.ones(3) / np.sqrt(3))
        np.testing.assert_allclose(vals, [-1.0, 1.0])
        np.testing.assert_allclose(probs, [1 / 3, 2 / 3])

    def test_eigenstate(self):
        rec = simulate_variance(SZ, np.array([1.0, 0.0]), 1000, seed=1)
        assert rec.exact_variance == 0.0 and rec.sample_variance == 0.0 and rec.stderr == 0.0

    def test_single_shot_warns(self):
        with pytest.warns(DegenerateSampleWarning):
            rec = simulate_variance(SX, np.array([1.0, 0.0]), 1)
        assert rec.degenerate and rec.sample_variance == 0.0 and rec.stderr == np.inf

    def test_zero_shots(self):
        with pytest.raises(ValueError):
            simulate_variance(SX, np.array([1.0, 0.0]), 0)

    def test_deterministic(self):
        psi = np.array([np.cos(0.3), np.sin(0.3)])
        a = simulate_variance(SX, psi, 5000, seed=42).to_dict()
        b = simulate_variance(SX, psi, 5000, seed=42).to_dict()
        assert a == b
        assert simulate_variance(SX, psi, 5000, seed=43).to_dict() != a

    def test_many_small_blocks_reproducible(self, monkeypatch):
        psi = np.array([np.cos(0.3), np.sin(0.3)])
        monkeypatch.setattr(expsim, "BLOCK_SHOTS", 100)
        a = simulate_variance(SX, psi, 1000, seed=5)
        b = simulate_variance(SX, psi, 1000, seed=5)
        assert a == b and a.shots == 1000

    def test_bernoulli_estimate(self):
        # two outcomes +-1 with p = 0.25: variance 4 p (1 - p)
        psi = np.array([np.sqrt(0.25), np.sqrt(0.75)])
        rec = simulate_variance(SZ, psi, 100_000, seed=0)
        assert rec.exact_variance == pytest.approx(0.75, abs=1e-14)
        assert rec.within(4.0)
        assert 0 < rec.stderr < 0.01

    @settings(max_examples=10)
    @given(seed=seeds)
    def test_calibration_hand(self, seed):
        sol = generator_commutator(np.diag([0.75, 0.25]), SX)
        rec = simulate_variance(sol.h_ab, sol.psi, 20_000, seed=seed, construction="commutator")
        assert rec.exact_variance == pytest.approx(HAND, abs=1e-12)
        assert rec.within(5.0)

    def test_record_dict(self):
        rec = EstimateRecord(1.0, 1.09, 0.05, 10, 0, "rank2")
        assert rec.to_dict()["construction"] == "rank2"
        assert rec.within(2.0) and not rec.within(1.0)
