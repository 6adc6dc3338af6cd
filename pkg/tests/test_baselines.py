import math

import numpy as np
import pytest
from scipy.special import ndtri

from isfsf.baselines import (
    digit_permutations,
    halton_sequence,
    inverse_normal_cdf,
    periodic_se_kernel,
    qmc_features,
    qmc_map,
    radical_inverse,
    rff_features,
    se_kernel_warped,
    warp,
)
from isfsf.coefficients import PeriodicSeHyperparams

import oracles


class TestWarp:
    def test_unit_circle(self):
        hp = PeriodicSeHyperparams((1.0, 2.0, 0.3), (0.7, 1.0, 3.0))
        u = warp(np.random.default_rng(0).normal(size=(100, 3)), hp)
        assert u.shape == (100, 6)
        np.testing.assert_allclose(u[:, 0::2] ** 2 + u[:, 1::2] ** 2, 1.0, atol=1e-12)

    def test_same_point_zero_distance(self):
        hp = PeriodicSeHyperparams.isotropic(2)
        x = np.array([0.3, -0.8])
        assert np.sum((warp(x, hp) - warp(x, hp)) ** 2) == 0.0

    def test_half_period_distance(self):
        hp = PeriodicSeHyperparams.isotropic(1, 1.0, 2 * np.pi)
        d = warp(np.array([np.pi]), hp) - warp(np.array([0.0]), hp)
        assert d @ d == pytest.approx(4.0, abs=1e-15)

    def test_quarter_period_distance(self):
        hp = PeriodicSeHyperparams.isotropic(2, 1.0, 1.0)
        d = warp(np.array([0.25, 0.0]), hp) - warp(np.array([0.0, 0.0]), hp)
        assert d @ d == pytest.approx(2.0, abs=1e-15)

    def test_warped_distance_identity(self):
        hp = PeriodicSeHyperparams((1.0, 1.0), (1.3, 0.4))
        rng = np.random.default_rng(2)
        x, y = rng.uniform(-2, 2, (2, 50, 2))
        d2 = np.sum((warp(x, hp) - warp(y, hp)) ** 2, axis=1)
        want = np.sum(2 * (1 - np.cos(hp.fundamental_frequencies * (x - y))), axis=1)
        np.testing.assert_allclose(d2, want, atol=1e-12)


class TestKernels:
    def test_analytic_matches_scalar_oracle(self):
        hp = PeriodicSeHyperparams((0.6, 1.4), (1.0, 2.5))
        rng = np.random.default_rng(4)
        x, y = rng.uniform(-2, 2, (2, 10, 2))
        k = periodic_se_kernel(x, y, hp)
        for i in range(10):
            for j in range(10):
                assert k[i, j] == pytest.approx(
                    oracles.periodic_se(x[i], y[j], hp.lengthscales, hp.periods), rel=1e-13
                )

    def test_warped_se_identity(self):
        hp = PeriodicSeHyperparams((0.3, 1.0, 2.0), (1.0, 0.5, 2.0))
        x, y = np.random.default_rng(8).uniform(-2, 2, (2, 40, 3))
        np.testing.assert_allclose(se_kernel_warped(x, y, hp), periodic_se_kernel(x, y, hp), atol=1e-12)


class TestInverseNormal:
    def test_median(self):
        assert inverse_normal_cdf(0.5) == 0.0

    def test_against_reference(self):
        p = np.concatenate([np.linspace(1e-6, 1 - 1e-6, 20001), [1e-6, 1 - 1e-6, 0.025, 0.975]])
        np.testing.assert_allclose(inverse_normal_cdf(p), ndtri(p), rtol=0, atol=1e-9)

    def test_deep_tails(self):
        p = np.logspace(-300, -7, 50)
        np.testing.assert_allclose(inverse_normal_cdf(p), ndtri(p), rtol=1e-12)
        # 1 - p is rounded, so compare with the tail mass actually represented
        upper = 1 - p[p > 1e-15]
        np.testing.assert_allclose(inverse_normal_cdf(upper), ndtri(upper), rtol=1e-9)

    def test_symmetry(self):
        p = np.linspace(0.001, 0.499, 50)
        np.testing.assert_allclose(inverse_normal_cdf(p), -inverse_normal_cdf(1 - p), atol=1e-14)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, float("nan")])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            inverse_normal_cdf(p)


class TestHalton:
    def test_base_two(self):
        np.testing.assert_allclose(halton_sequence(3, 1)[:, 0], [0.5, 0.25, 0.75])

    def test_base_three(self):
        np.testing.assert_allclose(halton_sequence(2, 2)[:, 1], [1 / 3, 2 / 3])

    def test_matches_radical_inverse_oracle(self):
        pts = halton_sequence(200, 6, burn=20)
        for j, b in enumerate((2, 3, 5, 7, 11, 13)):
            want = [oracles.radical_inverse(n, b) for n in range(21, 221)]
            np.testing.assert_allclose(pts[:, j], want, rtol=1e-15)

    def test_identity_permutation_is_standard(self):
        ident = [np.arange(b) for b in (2, 3, 5, 7)]
        np.testing.assert_array_equal(
            halton_sequence(100, 4, permutations=ident), halton_sequence(100, 4)
        )

    def test_generalized_is_deterministic_and_inside(self):
        a = halton_sequence(500, 18, generalized=True, seed=7)
        b = halton_sequence(500, 18, generalized=True, seed=7)
        assert a.tobytes() == b.tobytes()
        assert np.all((a > 0) & (a < 1))
        assert not np.array_equal(a, halton_sequence(500, 18, generalized=True, seed=8))

    def test_permutations_fix_zero(self):
        for b, perm in zip((2, 3, 5, 7, 11), digit_permutations(5, 3)):
            assert perm[0] == 0
            assert sorted(perm) == list(range(b))

    def test_low_discrepancy_mean(self):
        # stratified points integrate x on [0, 1) far better than 1/sqrt(n)
        pts = halton_sequence(1024, 3)
        assert np.all(np.abs(pts.mean(axis=0) - 0.5) < 5e-3)

    def test_dimension_limit(self):
        halton_sequence(2, 50)
        with pytest.raises(ValueError):
            halton_sequence(2, 51)

    def test_radical_inverse_zero(self):
        assert radical_inverse([0], 2)[0] == 0.0


class TestFeatures:
    @pytest.fixture
    def hp(self):
        return PeriodicSeHyperparams((0.8, 1.2), (1.0, 2.0))

    def test_rff_unit_norm(self, hp):
        pts = np.random.default_rng(0).uniform(-2, 2, (20, 2))
        phi = rff_features(pts, 64, hp, seed=3)
        assert phi.shape == (20, 128)
        np.testing.assert_allclose(np.sum(phi**2, axis=1), 1.0, atol=1e-13)

    @pytest.mark.parametrize("generalized", [False, True])
    def test_qmc_unit_diagonal_and_determinism(self, hp, generalized):
        pts = np.random.default_rng(1).uniform(-2, 2, (20, 2))
        a = qmc_features(pts, 50, hp, generalized, seed=5)
        b = qmc_features(pts, 50, hp, generalized, seed=5)
        assert a.tobytes() == b.tobytes()
        np.testing.assert_allclose(np.diag(a @ a.T), 1.0, atol=1e-13)

    def test_rff_unbiased(self):
        # mean over 50 seeds of the Gram entry at delta = 0.1
        hp = PeriodicSeHyperparams.isotropic(1, 1.0, 1.0)
        x, y = np.array([[0.0]]), np.array([[0.1]])
        est = np.mean([(rff_features(x, 2000, hp, s) @ rff_features(y, 2000, hp, s).T)[0, 0] for s in range(50)])
        truth = math.exp(math.cos(2 * math.pi * 0.1) - 1.0)
        assert abs(est - truth) < 0.02

    def test_qmc_converges(self):
        hp = PeriodicSeHyperparams.isotropic(2, 1.0)
        pts = np.random.default_rng(2).uniform(-2, 2, (100, 2))
        true = periodic_se_kernel(pts, pts, hp)
        errs = [np.linalg.norm(qmc_map(c, hp).gram(pts) - true) for c in (16, 256, 4096)]
        assert errs[0] > errs[1] > errs[2]

    def test_metadata(self, hp):
        m = qmc_map(10, hp, generalized=True, seed=4, burn=5)
        assert (m.sample.source, m.sample.seed, m.sample.burn) == ("ghalton", 4, 5)
        assert m.n_features == 20
