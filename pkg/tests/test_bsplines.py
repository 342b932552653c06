import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from splinesst.bsplines import (
    KnotError,
    SplineCurve,
    cardinal_bspline,
    cardinal_integer_values,
    eval_bspline,
    eval_bspline_derivative,
    eval_spline_curve,
    inner_product,
    marsden_coefficients,
)


def divided_difference_oracle(knots, m, k, t):
    """B-spline via divided differences of truncated powers, from scratch."""

    def trunc(x):
        return max(x - t, 0.0) ** (m - 1)

    pts = [Fraction(knots[i]) for i in range(k, k + m + 1)]

    def dd(points):
        if len(points) == 1:
            return trunc(float(points[0]))
        if points[-1] == points[0]:
            raise ValueError("confluent case not needed for simple knots")
        hi = dd(points[1:])
        lo = dd(points[:-1])
        return (hi - lo) / float(points[-1] - points[0])

    return float(knots[k + m] - knots[k]) * dd(pts)


def random_simple_knots(rng, count, scale=1.0):
    gaps = rng.uniform(0.3, 1.7, count - 1) * scale
    knots = np.concatenate([[0.0], np.cumsum(gaps)])
    return knots + rng.uniform(-1.0, 1.0)


class TestEvalBspline:
    def test_order1_indicator(self):
        knots = np.arange(0.0, 5.0)
        assert eval_bspline(knots, 1, 0, 0.5) == 1.0
        assert eval_bspline(knots, 1, 0, 1.0) == 0.0
        assert eval_bspline(knots, 1, 0, -0.1) == 0.0

    def test_cardinal_m8_matches_exact_table(self):
        knots = np.arange(0.0, 12.0)
        assert eval_bspline(knots, 8, 0, 4.0) == pytest.approx(2416 / 5040, abs=1e-14)

    def test_matches_divided_difference_oracle(self):
        knots = np.arange(0.0, 8.0)
        for t in [0.3, 1.0, 2.0, 2.7, 3.999]:
            assert eval_bspline(knots, 4, 0, t) == pytest.approx(
                divided_difference_oracle(knots, 4, 0, t), abs=1e-12
            )

    def test_oracle_on_random_knots(self):
        rng = np.random.default_rng(11)
        knots = random_simple_knots(rng, 9)
        for t in np.linspace(knots[0], knots[5], 17):
            assert eval_bspline(knots, 5, 0, t) == pytest.approx(
                divided_difference_oracle(knots, 5, 0, t), abs=1e-11
            )

    def test_support_is_exact(self):
        rng = np.random.default_rng(3)
        knots = random_simple_knots(rng, 10)
        for t in [knots[2] - 1e-9, knots[2 + 3] + 1e-9, knots[0] - 5.0]:
            assert eval_bspline(knots, 3, 2, t) == 0.0

    def test_multiplicity_error(self):
        knots = np.array([0.0, 0.0, 0.0, 1.0, 2.0])
        with pytest.raises(KnotError):
            eval_bspline(knots, 2, 0, 0.5)

    def test_index_error(self):
        with pytest.raises(IndexError):
            eval_bspline(np.arange(5.0), 3, 4, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        m=st.integers(min_value=1, max_value=8),
        seed=st.integers(min_value=0, max_value=10_000),
        frac=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
    )
    def test_nonnegative_and_partition_of_unity(self, m, seed, frac):
        rng = np.random.default_rng(seed)
        knots = random_simple_knots(rng, 2 * m + 2)
        t = knots[m] + frac * (knots[m + 1] - knots[m])
        vals = [eval_bspline(knots, m, k, t) for k in range(len(knots) - m)]
        assert all(v >= 0.0 for v in vals)
        assert sum(vals) == pytest.approx(1.0, abs=1e-12)

    def test_right_end_limit_on_clamped_knots(self):
        knots = np.array([0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0])
        vals = [eval_bspline(knots, 3, k, 2.0) for k in range(4)]
        assert vals == pytest.approx([0.0, 0.0, 0.0, 1.0])


class TestDerivative:
    def test_r0_is_value(self):
        knots = np.arange(0.0, 7.0)
        assert eval_bspline_derivative(knots, 4, 0, 1.3, 0) == eval_bspline(knots, 4, 0, 1.3)

    def test_hat_slope(self):
        knots = np.arange(0.0, 5.0)
        assert eval_bspline_derivative(knots, 2, 0, 0.5, 1) == pytest.approx(1.0)
        assert eval_bspline_derivative(knots, 2, 0, 1.5, 1) == pytest.approx(-1.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        knots = random_simple_knots(rng, 9)
        h = 1e-5
        for t in np.linspace(knots[1] + 0.01, knots[5] - 0.01, 9):
            fd = (eval_bspline(knots, 5, 0, t + h) - eval_bspline(knots, 5, 0, t - h)) / (2 * h)
            assert eval_bspline_derivative(knots, 5, 0, t, 1) == pytest.approx(fd, abs=1e-7)

    def test_distributional_order_rejected(self):
        with pytest.raises(ValueError):
            eval_bspline_derivative(np.arange(6.0), 3, 0, 1.0, 3)


class TestCardinalTable:
    def test_m8_row(self):
        table = cardinal_integer_values(8)
        expect = [0, 1, 120, 1191, 2416, 1191, 120, 1, 0]
        assert [v * math.factorial(7) for v in table.values] == expect

    def test_m10_row(self):
        table = cardinal_integer_values(10)
        expect = [0, 1, 502, 14608, 88234, 156190, 88234, 14608, 502, 1, 0]
        assert [v * math.factorial(9) for v in table.values] == expect

    def test_hat_is_kronecker(self):
        table = cardinal_integer_values(2)
        assert table.values == (Fraction(0), Fraction(1), Fraction(0))

    @pytest.mark.parametrize("r", range(2, 13))
    def test_symmetry_and_sum(self, r):
        table = cardinal_integer_values(r)
        assert table.values == tuple(reversed(table.values))
        assert sum(table.values) == 1

    def test_vectorized_cardinal_agrees(self):
        ts = np.linspace(-1.0, 7.0, 57)
        knots = np.arange(0.0, 8.0)
        direct = np.array([eval_bspline(knots, 6, 0, t) for t in ts])
        assert np.allclose(cardinal_bspline(6, ts), direct, atol=1e-13)


class TestInnerProduct:
    def test_cardinal_closed_form(self):
        knots = np.arange(0.0, 10.0)
        assert inner_product(knots, 4, 0, 0) == pytest.approx(2416 / 5040, abs=1e-15)

    def test_disjoint_supports(self):
        knots = np.arange(0.0, 14.0)
        assert inner_product(knots, 4, 0, 4) == 0.0

    def test_matches_adaptive_quadrature(self):
        rng = np.random.default_rng(8)
        knots = random_simple_knots(rng, 11)
        for k, u in [(0, 0), (0, 2), (1, 3), (2, 2)]:
            lo, hi = knots[max(k, u)], knots[min(k, u) + 4]
            oracle = quad(
                lambda x: eval_bspline(knots, 4, k, x) * eval_bspline(knots, 4, u, x),
                lo,
                hi,
                points=[kn for kn in knots if lo < kn < hi],
                limit=200,
                epsabs=1e-13,
                epsrel=1e-13,
            )[0]
            assert inner_product(knots, 4, k, u) == pytest.approx(oracle, abs=1e-10)

    def test_closed_form_equals_quadrature_on_uniform(self):
        # force the quadrature path with an unaligned copy
        knots = np.arange(0.0, 10.0)
        shifted = knots.copy()
        shifted[-1] += 0.5  # break uniformity outside both supports
        exact = inner_product(knots, 3, 1, 2)
        quad_path = inner_product(shifted, 3, 1, 2)
        assert quad_path == pytest.approx(exact, abs=1e-10)


class TestMarsden:
    def test_degree_zero_is_ones(self):
        knots = np.arange(0.0, 9.0)
        assert np.allclose(marsden_coefficients(knots, 4, 0), 1.0)

    def test_linear_cardinal(self):
        knots = np.arange(0.0, 7.0)
        assert np.allclose(marsden_coefficients(knots, 2, 1), np.arange(1.0, 6.0))

    @pytest.mark.parametrize("l", [0, 1, 2, 3])
    def test_monomial_reconstruction(self, l):
        rng = np.random.default_rng(l)
        knots = random_simple_knots(rng, 14)
        m = 4
        c = marsden_coefficients(knots, m, l)
        ts = np.linspace(knots[m - 1], knots[-m], 41)
        for t in ts:
            val = sum(c[j] * eval_bspline(knots, m, j, t) for j in range(len(c)))
            assert val == pytest.approx(t**l, abs=1e-9 * max(1.0, abs(t) ** l))


class TestSplineCurve:
    def test_partition_of_unity_curve(self):
        rng = np.random.default_rng(0)
        knots = random_simple_knots(rng, 12)
        curve = SplineCurve(order=4, knots=knots, coeffs=np.ones(len(knots) - 4))
        ts = np.linspace(knots[3], knots[-4], 33)
        assert np.allclose(eval_spline_curve(curve, ts), 1.0, atol=1e-12)

    def test_single_coefficient_is_basis(self):
        knots = np.arange(0.0, 9.0)
        coeffs = np.zeros(5)
        coeffs[2] = 3.5
        curve = SplineCurve(order=4, knots=knots, coeffs=coeffs)
        for t in [2.5, 3.8, 5.2]:
            assert eval_spline_curve(curve, t) == pytest.approx(
                3.5 * eval_bspline(knots, 4, 2, t)
            )

    def test_marsden_coeffs_reproduce_square(self):
        knots = np.arange(0.0, 12.0)
        c = marsden_coefficients(knots, 4, 2)
        curve = SplineCurve(order=4, knots=knots, coeffs=c)
        ts = np.linspace(3.0, 8.0, 21)
        assert np.allclose(eval_spline_curve(curve, ts), ts**2, atol=1e-10)

    def test_outside_is_zero_with_mask(self):
        knots = np.arange(0.0, 8.0)
        curve = SplineCurve(order=3, knots=knots, coeffs=np.ones(5))
        vals, mask = eval_spline_curve(curve, np.array([-1.0, 3.0, 9.0]), return_mask=True)
        assert vals[0] == 0.0 and vals[2] == 0.0
        assert mask.tolist() == [False, True, False]

    def test_coefficient_count_checked(self):
        with pytest.raises(ValueError):
            SplineCurve(order=3, knots=np.arange(8.0), coeffs=np.ones(3))
