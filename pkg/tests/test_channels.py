import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedfs.channels import (
    KrausChannel,
    apply,
    apply_tangent,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    is_unitary,
    random_channel,
    sqrt_kraus_pushforward,
    stinespring,
    unitary_channel,
)
from mixedfs.errors import NotTracePreserving, ShapeError, TooManyKraus
from mixedfs.states import random_density

from conftest import SX, random_unitary, seeds


def test_not_trace_preserving():
    with pytest.raises(NotTracePreserving):
        KrausChannel((np.eye(2), np.eye(2)))


def test_empty_or_mismatched():
    with pytest.raises(ShapeError):
        KrausChannel(())
    with pytest.raises(ShapeError):
        KrausChannel((np.eye(2), np.zeros((3, 3))))


class TestApply:
    def test_identity(self, rng):
        rho = random_density(3, seed=rng)
        np.testing.assert_allclose(apply(identity_channel(3), rho).matrix, rho.matrix)

    def test_full_depolarizing(self, rng):
        np.testing.assert_allclose(apply(depolarizing_channel(1.0), random_density(2, seed=rng)).matrix,
                                   np.eye(2) / 2, atol=1e-15)

    def test_half_dephasing_of_plus(self):
        out = apply(dephasing_channel(0.5), np.full((2, 2), 0.5))
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            apply(identity_channel(2), np.eye(3) / 3)

    def test_tangent(self):
        assert np.all(apply_tangent(dephasing_channel(0.5), np.zeros((2, 2))) == 0)
        np.testing.assert_allclose(apply_tangent(identity_channel(2), SX), SX)
        np.testing.assert_allclose(apply_tangent(dephasing_channel(0.5), SX), 0, atol=1e-15)

    @given(seed=seeds, n=st.integers(2, 4), k=st.integers(1, 5))
    def test_trace_preservation(self, seed, n, k):
        rng = np.random.default_rng(seed)
        ch = random_channel(n, k, rng)
        out = apply(ch, random_density(n, seed=rng))
        assert abs(np.trace(out.matrix) - 1) <= 1e-9

    def test_unital_fixed_point(self):
        for ch in (dephasing_channel(0.3), depolarizing_channel(0.4)):
            assert ch.is_unital()
            np.testing.assert_allclose(apply(ch, np.eye(2) / 2).matrix, np.eye(2) / 2, atol=1e-15)


class TestPushforward:
    def test_identity(self, rng):
        rho = random_density(2, seed=rng)
        pf = sqrt_kraus_pushforward(rho, identity_channel(2))
        np.testing.assert_allclose(pf.matrix, rho.sqrt, atol=1e-14)
        assert pf.deviation < 1e-12

    def test_unitary_covariance(self, rng):
        rho = random_density(3, seed=rng)
        pf = sqrt_kraus_pushforward(rho, unitary_channel(random_unitary(rng, 3)))
        assert pf.deviation < 1e-12
        assert abs(pf.norm_defect) < 1e-12

    def test_dephasing_pure_state_deviates(self):
        psi = np.array([np.cos(0.4), np.sin(0.4)])
        pf = sqrt_kraus_pushforward(np.outer(psi, psi), dephasing_channel(0.5))
        assert pf.deviation > 0.1
        assert pf.norm_defect > 0


class TestStinespring:
    def test_identity(self):
        d = stinespring(identity_channel(2))
        np.testing.assert_allclose(d.unitary, np.eye(2), atol=1e-15)
        np.testing.assert_array_equal(d.env_state, [1])

    def test_unitary_channel(self, rng):
        v = random_unitary(rng, 2)
        d = stinespring(unitary_channel(v))
        np.testing.assert_allclose(d.unitary, v, atol=1e-15)

    def test_random_rank_two_seed_11(self):
        ch = random_channel(2, 2, seed=11)
        d = stinespring(ch)
        assert is_unitary(d.unitary)
        rho = random_density(2, seed=1)
        assert np.abs(d.apply(rho) - apply(ch, rho).matrix).max() <= 1e-8

    def test_isometry_block(self, rng):
        ch = random_channel(3, 2, rng)
        d = stinespring(ch)
        m = d.env_dim
        for x in range(3):
            col = d.unitary[:, x * m].reshape(3, m)
            for i, a in enumerate(ch.kraus):
                np.testing.assert_allclose(col[:, i], a[:, x], atol=1e-14)

    def test_too_many_kraus(self):
        ops = tuple(np.eye(2) / np.sqrt(5) for _ in range(5))
        with pytest.raises(TooManyKraus):
            stinespring(KrausChannel(ops))

    @given(seed=seeds, n=st.integers(2, 3), k=st.integers(1, 4))
    def test_round_trip(self, seed, n, k):
        rng = np.random.default_rng(seed)
        ch = random_channel(n, k, rng)
        d = stinespring(ch, seed=seed)
        rho = random_density(n, seed=rng)
        assert np.abs(d.apply(rho) - apply(ch, rho).matrix).max() <= 1e-8


class TestRandomChannel:
    def test_single_kraus_is_unitary(self):
        (u,) = random_channel(3, 1, seed=2).kraus
        assert is_unitary(u)

    def test_seed_3_trace_preserving(self):
        ch = random_channel(2, 4, seed=3)
        assert KrausChannel.tp_residual(ch.kraus) <= 1e-10

    def test_deterministic(self):
        a, b = random_channel(2, 3, seed=8), random_channel(2, 3, seed=8)
        assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))

    def test_kraus_count_validated(self):
        with pytest.raises(ValueError):
            random_channel(2, 0)

    def test_superoperator_matches_apply(self, rng):
        ch = random_channel(2, 3, rng)
        rho = random_density(2, seed=rng)
        out = (ch.superoperator() @ rho.matrix.reshape(-1)).reshape(2, 2)
        np.testing.assert_allclose(out, apply(ch, rho).matrix, atol=1e-14)
