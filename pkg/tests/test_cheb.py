import math

import numpy as np
import pytest

from capspec.cheb import (
    bary_weights,
    cheb_coeffs,
    cheb_values,
    chebpts,
    diffmat_rect,
    eval_row,
    resample,
    resample_matrix,
)


class TestChebpts:
    def test_two_points(self):
        assert np.array_equal(chebpts(2), [-1.0, 1.0])

    def test_three_points(self):
        assert np.array_equal(chebpts(3), [-1.0, 0.0, 1.0])

    def test_five_points(self):
        s = math.sqrt(2) / 2
        np.testing.assert_allclose(chebpts(5), [-1.0, -s, 0.0, s, 1.0], atol=1e-15)

    def test_rejects_degenerate_grid(self):
        with pytest.raises(ValueError):
            chebpts(1)

    @pytest.mark.parametrize("n", [2, 5, 8, 15, 64])
    def test_ascending_with_exact_endpoints(self, n):
        x = chebpts(n)
        assert np.all(np.diff(x) > 0)
        assert x[0] == -1.0 and x[-1] == 1.0

    @pytest.mark.parametrize("n", [4, 9, 16, 33])
    def test_exactly_antisymmetric(self, n):
        x = chebpts(n)
        assert np.array_equal(x, -x[::-1])


class TestDiffmatRect:
    def test_order0_downsamples_constant(self):
        np.testing.assert_allclose(diffmat_rect(4, 0) @ np.ones(4), np.ones(3), atol=1e-15)

    def test_order1_square_law(self):
        got = diffmat_rect(4, 1) @ chebpts(4) ** 2
        np.testing.assert_allclose(got, 2 * chebpts(3), atol=1e-13)

    def test_order1_kills_constants(self):
        np.testing.assert_allclose(diffmat_rect(4, 1) @ np.full(4, 7.3), 0, atol=1e-13)

    def test_rejects_unsupported_order(self):
        with pytest.raises(ValueError):
            diffmat_rect(6, 2)

    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_exact_on_full_degree_polynomials(self, n):
        rng = np.random.default_rng(n)
        p = np.polynomial.polynomial.Polynomial(rng.standard_normal(n))
        dp = p.deriv()
        got = diffmat_rect(n, 1) @ p(chebpts(n))
        want = dp(chebpts(n - 1))
        assert np.abs(got - want).max() <= 1e-12 * max(1.0, np.abs(want).max())

    @pytest.mark.parametrize("n", [5, 9, 17, 40])
    def test_order0_matches_resample(self, n):
        rng = np.random.default_rng(n)
        vals = rng.standard_normal(n)
        np.testing.assert_allclose(
            diffmat_rect(n, 0) @ vals, resample(vals, n - 1), atol=1e-13
        )

    def test_spectral_accuracy_for_exp(self):
        err = np.abs(diffmat_rect(20, 1) @ np.exp(chebpts(20)) - np.exp(chebpts(19))).max()
        assert err < 1e-10


class TestEvalRow:
    def test_endpoint_rows_are_unit_vectors(self):
        assert np.array_equal(eval_row(3, 1.0), [0.0, 0.0, 1.0])
        assert np.array_equal(eval_row(3, -1.0), [1.0, 0.0, 0.0])

    def test_odd_cubic_vanishes_at_origin(self):
        assert abs(eval_row(4, 0.0) @ chebpts(4) ** 3) <= 1e-14

    @pytest.mark.parametrize("tau0", [-0.93, -0.2, 0.0, 0.41, 0.999])
    def test_partition_of_unity(self, tau0):
        for n in (3, 8, 21):
            assert abs(eval_row(n, tau0).sum() - 1.0) <= 1e-13

    def test_rejects_points_outside_interval(self):
        with pytest.raises(ValueError):
            eval_row(5, 1.5)


class TestResample:
    def test_constant(self):
        np.testing.assert_allclose(resample(np.full(5, 2.5), 9), np.full(9, 2.5), atol=1e-14)

    def test_cubic_up(self):
        got = resample(chebpts(4) ** 3, 7)
        np.testing.assert_allclose(got, chebpts(7) ** 3, atol=1e-13)

    def test_identity(self):
        v = np.random.default_rng(0).standard_normal(6)
        assert np.array_equal(resample(v, 6), v)

    def test_grid_hit_rows_are_exact(self):
        P = resample_matrix(5, chebpts(5))
        np.testing.assert_allclose(P, np.eye(5), atol=0)


class TestChebCoeffs:
    def test_constant(self):
        c = cheb_coeffs(np.full(6, 3.25))
        np.testing.assert_allclose(c, [3.25, 0, 0, 0, 0, 0], atol=1e-15)

    def test_second_basis_polynomial(self):
        c = cheb_coeffs(2 * chebpts(5) ** 2 - 1)
        assert abs(c[2] - 1.0) <= 1e-14
        c[2] = 0.0
        assert np.abs(c).max() <= 1e-14

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        vals = rng.standard_normal(17)
        back = cheb_values(cheb_coeffs(vals))
        assert np.abs(back - vals).max() <= 1e-12 * np.abs(vals).max()

    def test_weights_shape(self):
        w = bary_weights(6)
        assert w[0] == 0.5 and w[-1] == -0.5 and set(np.abs(w[1:-1])) == {1.0}


def test_grid_closed_under_negation():
    for n in (4, 7, 12, 31):
        x = chebpts(n)
        assert set(x.tolist()) == set((-x).tolist())
