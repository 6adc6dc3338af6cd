import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isfsf.coefficients import (
    CoefficientTable,
    PeriodicSeHyperparams,
    bessel_i_scaled,
    bessel_i_scaled_orders,
    periodic_se_coefficients,
    truncation_error,
)

import oracles

# frozen from oracles.bessel_series_scaled
I0_AT_1 = 0.46575960759364043
I5_AT_1 = 9.986571411208693e-05


class TestBessel:
    def test_small_argument_limit(self):
        assert bessel_i_scaled(0, 1e-14) == pytest.approx(1.0, abs=1e-13)
        assert bessel_i_scaled(0, 0.0) == 1.0
        assert bessel_i_scaled(3, 0.0) == 0.0

    def test_frozen_values(self):
        assert bessel_i_scaled(0, 1.0) == pytest.approx(I0_AT_1, rel=1e-14)
        assert bessel_i_scaled(5, 1.0) == pytest.approx(I5_AT_1, rel=1e-9)

    def test_frozen_values_match_oracle(self):
        assert oracles.bessel_series_scaled(0, 1.0, 12) == pytest.approx(I0_AT_1, rel=1e-15)
        assert oracles.bessel_series_scaled(5, 1.0) == pytest.approx(I5_AT_1, rel=1e-15)

    @pytest.mark.parametrize("x", [1e-3, 0.01, 0.3, 1.0, 2.5, 5.0, 10.0])
    def test_series_oracle(self, x):
        got = bessel_i_scaled_orders(40, x)
        want = np.array([oracles.bessel_series_scaled(k, x) for k in range(41)])
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=0)

    @pytest.mark.parametrize("x", [50.0, 400.0, 1e4])
    def test_large_argument_normalisation(self, x):
        # tiny lengthscales: values stay finite and the identity sum = 1 holds
        vals = bessel_i_scaled_orders(int(20 * math.sqrt(x)), x)
        assert np.all(np.isfinite(vals))
        assert vals[0] + 2 * vals[1:].sum() == pytest.approx(1.0, abs=1e-12)

    def test_large_argument_asymptotic(self):
        # e^-x I_0(x) ~ 1/sqrt(2 pi x) (1 + 1/(8x) + 9/(128 x^2))
        x = 1e4
        approx = (1 + 1 / (8 * x) + 9 / (128 * x**2)) / math.sqrt(2 * math.pi * x)
        assert bessel_i_scaled(0, x) == pytest.approx(approx, rel=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(x=st.floats(1e-3, 50.0))
    def test_decreasing_in_order(self, x):
        vals = bessel_i_scaled_orders(15, x)
        assert np.all(np.diff(vals) < 0)
        assert np.all((vals > 0) & (vals <= 1))

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -1.0])
    def test_bad_argument(self, bad):
        with pytest.raises(ValueError):
            bessel_i_scaled(0, bad)

    def test_negative_order(self):
        with pytest.raises(ValueError):
            bessel_i_scaled(-1, 1.0)


class TestCoefficients:
    def test_single_term(self):
        np.testing.assert_allclose(periodic_se_coefficients(1.0, 1), [I0_AT_1], rtol=1e-14)

    def test_doubling_beyond_zero(self):
        q2 = periodic_se_coefficients(0.8, 6)
        want = [oracles.se_q2(0.8, k) for k in range(6)]
        np.testing.assert_allclose(q2, want, rtol=1e-12)

    @pytest.mark.parametrize("l", [0.05, 0.1, 0.3, 1.0, 3.0])
    def test_mass_converges_to_one(self, l):
        q2 = periodic_se_coefficients(l, 400)
        assert q2.sum() == pytest.approx(1.0, abs=1e-12)

    def test_small_lengthscale_needs_more_refinement(self):
        def needed(l, tol=1e-6):
            q2 = periodic_se_coefficients(l, 200)
            return int(np.argmax(1 - np.cumsum(q2) < tol)) + 1

        assert needed(0.3) > needed(1.0)

    @settings(max_examples=40, deadline=None)
    @given(l=st.floats(0.05, 5.0), r=st.integers(1, 60))
    def test_partial_sums(self, l, r):
        q2 = periodic_se_coefficients(l, r + 1)
        partial = np.cumsum(q2)
        assert np.all(q2 >= 0)
        assert np.all(np.diff(q2[1:]) <= 0)
        assert partial[-1] <= 1.0 + 1e-15
        assert np.all(np.diff(partial) >= 0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            periodic_se_coefficients(0.0, 3)
        with pytest.raises(ValueError):
            periodic_se_coefficients(1.0, 0)


class TestHyperparams:
    def test_frequencies(self):
        hp = PeriodicSeHyperparams((1.0, 0.5), (1.0, 4.0))
        np.testing.assert_allclose(hp.fundamental_frequencies, [2 * np.pi, np.pi / 2], rtol=1e-15)

    def test_broadcast(self):
        hp = PeriodicSeHyperparams.create(3, 0.7, (1.0, 2.0, 3.0))
        assert hp.lengthscales == (0.7, 0.7, 0.7)
        assert hp.dimension == 3

    @pytest.mark.parametrize("ls,ps", [((1.0, -1.0), (1.0, 1.0)), ((1.0,), (0.0,)), ((1.0, 1.0), (1.0,))])
    def test_invalid(self, ls, ps):
        with pytest.raises(ValueError):
            PeriodicSeHyperparams(ls, ps)


class TestTable:
    def test_products_and_range(self):
        hp = PeriodicSeHyperparams.isotropic(2, 1.0)
        table = CoefficientTable.periodic_se(hp, (3, 2))
        rho = table.products(np.array([[0, 0], [2, 1]]))
        q = table.q_squared
        np.testing.assert_allclose(rho, [q[0][0] * q[1][0], q[0][2] * q[1][1]])
        with pytest.raises(IndexError):
            table.products(np.array([[0, 2]]))

    def test_tables_are_read_only(self):
        table = CoefficientTable.periodic_se(PeriodicSeHyperparams.isotropic(1), 4)
        with pytest.raises(ValueError):
            table.q_squared[0][0] = 1.0

    def test_custom_sequences(self):
        hp = PeriodicSeHyperparams.isotropic(2)
        table = CoefficientTable.from_sequences([[0.5, 0.5], [1.0]], hp)
        assert table.lengths == (2, 1)
        with pytest.raises(ValueError):
            CoefficientTable.from_sequences([[0.5, -0.1], [1.0]], hp)


class TestTruncationError:
    def test_single_term(self):
        hp = PeriodicSeHyperparams.isotropic(1, 1.0)
        assert truncation_error(1, hp) == pytest.approx(1 - I0_AT_1, rel=1e-14)

    def test_vanishes(self):
        assert truncation_error(200, PeriodicSeHyperparams.isotropic(3, 0.3)) < 1e-14

    @pytest.mark.parametrize("dim", [2, 5, 12])
    @pytest.mark.parametrize("r", [1, 3, 6])
    def test_isotropic_power_law(self, dim, r):
        e1 = truncation_error(r, PeriodicSeHyperparams.isotropic(1, 0.6))
        ed = truncation_error(r, PeriodicSeHyperparams.isotropic(dim, 0.6))
        assert ed == pytest.approx(1 - (1 - e1) ** dim, rel=1e-12)

    def test_non_isotropic_refinements(self):
        hp = PeriodicSeHyperparams((0.5, 2.0), (1.0, 1.0))
        want = 1 - sum(oracles.se_q2(0.5, k) for k in range(5)) * sum(oracles.se_q2(2.0, k) for k in range(2))
        assert truncation_error((5, 2), hp) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("l", [0.1, 0.5, 1.0])
    def test_non_increasing(self, l):
        hp = PeriodicSeHyperparams.isotropic(4, l)
        eps = [truncation_error(r, hp) for r in range(1, 25)]
        assert all(b <= a for a, b in zip(eps, eps[1:]))
