import math

import numpy as np
import pytest
from scipy.integrate import quad

pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")

from splinesst.bsplines import cardinal_bspline, eval_bspline_derivative
from splinesst.vmwav import (
    analytic_values,
    analytic_vm,
    boundary_scale_plan,
    boundary_vm,
    gaussian_asymptotics_distance,
    hilbert_cardinal,
    interior_values,
    interior_vm,
    spectrum_and_slr,
    vm_derivative,
    vm_general_knots,
)


def wavelet_moment(w, order):
    """High-order quadrature moment of a wavelet, split at its knots."""
    lo, hi = w.support
    pts = [k for k in np.unique(w.knots) if lo < k < hi]
    val, _ = quad(
        lambda x: x**order * float(w.evaluate(x)), lo, hi, points=pts, limit=300, epsabs=1e-12
    )
    return val


def clamped_integer_knots(m, length):
    return np.concatenate(
        [np.zeros(m - 1), np.arange(0.0, length + 1.0), np.full(m - 1, float(length))]
    )


class TestInterior:
    def test_haar(self):
        w = interior_vm(1, 1)
        assert w.evaluate(np.array([0.25, 0.75])) == pytest.approx([1.0, -1.0])

    def test_m4_n4_binomial_coefficients(self):
        w = interior_vm(4, 4)
        assert w.coeffs.tolist() == [1.0, -4.0, 6.0, -4.0, 1.0]

    @pytest.mark.parametrize("m,n", [(1, 1), (2, 3), (3, 2), (4, 4), (6, 5), (5, 6)])
    def test_identity_with_derivative_construction(self, m, n):
        # binomial combination vs n-th B-spline derivative at doubled argument
        knots = np.arange(0.0, m + n + 2.0)  # extra knot keeps the endpoint interior
        xs = np.linspace(0.0, (m + n) / 2.0, 1003)[:-1] + 1e-4
        lhs = interior_values(m, n, xs)
        rhs = np.array([eval_bspline_derivative(knots, m + n, 0, 2 * x, n) for x in xs])
        assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_moments_vanish_to_order_n(self):
        w = interior_vm(3, 5)
        for ell in range(5):
            assert abs(wavelet_moment(w, ell)) <= 1e-9
        assert abs(wavelet_moment(w, 5)) >= 1e-3

    def test_support(self):
        w = interior_vm(4, 3)
        assert w.support == (0.0, 3.5)
        assert w.evaluate(3.6) == 0.0


class TestGeneralKnots:
    def test_integer_knots_match_interior_at_halved_argument(self):
        w = vm_general_knots(np.arange(0.0, 12.0), 4, 4, 0)
        xs = np.linspace(0.0, 8.0, 511)
        assert np.max(np.abs(w.evaluate(xs) - interior_values(4, 4, xs / 2.0))) == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_knot_moments(self, seed):
        rng = np.random.default_rng(seed)
        gaps = rng.uniform(0.3, 1.4, 11)
        knots = np.concatenate([[0.0], np.cumsum(gaps)])
        m, n = 3, 4
        w = vm_general_knots(knots, m, n, 1)
        for ell in range(n):
            assert abs(wavelet_moment(w, ell)) <= 1e-8
        assert abs(wavelet_moment(w, n)) >= 1e-4

    def test_degenerate_n0_is_bspline(self):
        knots = np.arange(0.0, 7.0)
        w = vm_general_knots(knots, 4, 0, 0)
        xs = np.linspace(0.0, 4.0, 101)
        assert np.allclose(w.evaluate(xs), cardinal_bspline(4, xs))
        assert wavelet_moment(w, 0) == pytest.approx(1.0, abs=1e-10)

    def test_insufficient_knots(self):
        with pytest.raises(IndexError):
            vm_general_knots(np.arange(0.0, 5.0), 3, 3, 0)


class TestBoundary:
    M4_Q_MINUS_1 = np.array([7 / 3, -319 / 60, 101 / 15, -25 / 6, 1.0])
    # the published table lists q_{-2} mirrored; this is the left-end order
    M4_Q_MINUS_2 = np.array([6.0, -57 / 5, 919 / 100, -116 / 25, 1.0])

    @staticmethod
    def _normalize(v):
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return v if v[np.argmax(np.abs(v))] > 0 else -v

    def test_left_boundary_rationals(self):
        knots = clamped_integer_knots(4, 12)
        w1 = boundary_vm(knots, 4, 4, start=2)  # spans the second boundary B-spline
        assert np.max(np.abs(w1.coeffs - self._normalize(self.M4_Q_MINUS_1))) <= 1e-9
        w2 = boundary_vm(knots, 4, 4, start=1)
        assert np.max(np.abs(w2.coeffs - self._normalize(self.M4_Q_MINUS_2))) <= 1e-9
        assert w1.kind == "boundary-left" and w2.kind == "boundary-left"

    def test_right_boundary_mirror_matches_published_order(self):
        # mirrored wavelet at the right end carries the published listing
        knots = clamped_integer_knots(4, 12)
        n_basis = len(knots) - 4
        w = boundary_vm(knots, 4, 4, start=n_basis - 6)
        published = self._normalize([1.0, -116 / 25, 919 / 100, -57 / 5, 6.0])
        assert np.max(np.abs(w.coeffs - published)) <= 1e-9
        assert w.kind == "boundary-right"

    def test_interior_start_recovers_binomial(self):
        knots = clamped_integer_knots(4, 16)
        w = boundary_vm(knots, 4, 4, start=8)
        expect = self._normalize([1.0, -4.0, 6.0, -4.0, 1.0])
        assert np.max(np.abs(w.coeffs - expect)) <= 1e-9

    def test_boundary_moments_vanish(self):
        knots = clamped_integer_knots(4, 10)
        w = boundary_vm(knots, 4, 4, start=1)
        for ell in range(4):
            assert abs(wavelet_moment(w, ell)) <= 1e-8

    def test_null_space_is_one_dimensional(self):
        from splinesst.vmwav import _moment_row

        knots = clamped_integer_knots(4, 12)
        a = np.vstack([_moment_row(knots, 4, 1, 5, l) for l in range(4)])
        s = np.linalg.svd(a, compute_uv=False)
        # four nonzero singular values, fifth is structurally absent
        assert s[-1] / s[0] > 1e-6


class TestDerivative:
    def test_half_integer_factor_two(self):
        w = vm_derivative(interior_vm(4, 4))
        xs = np.linspace(0.0, 4.0, 401)
        assert np.max(np.abs(w.evaluate(xs) - 2.0 * interior_values(3, 5, xs))) <= 1e-10

    def test_finite_difference_oracle(self):
        w = interior_vm(4, 4)
        dw = vm_derivative(w)
        h = 1e-5
        xs = np.linspace(0.1, 3.9, 57)
        fd = (w.evaluate(xs + h) - w.evaluate(xs - h)) / (2 * h)
        assert np.max(np.abs(fd - dw.evaluate(xs))) <= 1e-4

    def test_moments_gain_one_order(self):
        dw = vm_derivative(interior_vm(4, 3))
        for ell in range(4):
            assert abs(wavelet_moment(dw, ell)) <= 1e-8

    def test_integral_is_zero(self):
        dw = vm_derivative(interior_vm(5, 2))
        assert abs(wavelet_moment(dw, 0)) <= 1e-10

    def test_order_one_rejected(self):
        with pytest.raises(ValueError):
            vm_derivative(interior_vm(1, 3))


def pv_hilbert_oracle(m, t):
    """pi * Hilbert transform by principal-value quadrature."""

    def f(x):
        return float(cardinal_bspline(m, np.asarray(x)))

    if t <= 0.0 or t >= m:
        return quad(lambda x: f(x) / (t - x), 0.0, float(m), limit=400)[0]
    return -quad(f, 0.0, float(m), weight="cauchy", wvar=float(t), limit=400)[0]


class TestHilbert:
    def test_n1_closed_form(self):
        assert hilbert_cardinal(1, 2.0) == pytest.approx(math.log(2.0))

    def test_n2_at_half(self):
        assert hilbert_cardinal(2, 0.5) == pytest.approx(-1.5 * math.log(3.0))

    def test_n2_matches_paper_closed_form(self):
        ts = np.linspace(-2.0, 4.0, 101)
        ts = ts[(np.abs(ts % 1) > 1e-9)]
        expect = ts * np.log(np.abs(ts / (ts - 1))) + (2 - ts) * np.log(
            np.abs((ts - 1) / (ts - 2))
        )
        assert np.max(np.abs(hilbert_cardinal(2, ts) - expect)) <= 1e-12

    def test_n1_singular_points_raise(self):
        with pytest.raises(ValueError):
            hilbert_cardinal(1, 1.0)

    def test_n2_finite_at_knots(self):
        vals = hilbert_cardinal(2, np.array([0.0, 1.0, 2.0]))
        assert np.all(np.isfinite(vals))
        assert vals[1] == pytest.approx(0.0, abs=1e-14)  # odd symmetry about the center

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_recursion_matches_pv_quadrature(self, m):
        ts = np.linspace(-3.0, m + 3.0, 29) + 0.0137
        mine = hilbert_cardinal(m, ts)
        oracle = np.array([pv_hilbert_oracle(m, t) for t in ts])
        assert np.max(np.abs(mine - oracle)) <= 1e-4

    def test_n5_dense_offsets(self):
        ts = np.arange(-2.0, 7.0, 0.09) + 0.005
        mine = hilbert_cardinal(5, ts)
        oracle = np.array([pv_hilbert_oracle(5, t) for t in ts])
        assert np.max(np.abs(mine - oracle)) <= 1e-4


class TestAnalytic:
    def test_real_part_is_wavelet(self):
        grid = np.linspace(-2.0, 10.0, 301)
        samples = analytic_vm(4, 4, grid)
        direct = vm_general_knots(np.arange(0.0, 2 * 8 + 1.0), 4, 4, 0).evaluate(grid)
        assert np.max(np.abs(samples.values.real - direct)) <= 1e-12

    def test_one_sided_spectrum(self):
        dt = 0.02
        grid = np.arange(-60.0, 70.0, dt) + dt / 2
        vals = analytic_values(4, 4, grid)
        spec = np.fft.fft(vals)
        freqs = np.fft.fftfreq(len(vals), dt)
        neg = np.sum(np.abs(spec[freqs < 0]) ** 2)
        assert neg / np.sum(np.abs(spec) ** 2) <= 0.01

    def test_adjoint_transfer_to_signal(self):
        # <g, psi*> equals <g*, psi> for an analytic test signal
        import scipy.signal

        dt = 0.01
        grid = np.arange(-40.0, 50.0, dt) + dt / 2
        vals = analytic_values(3, 3, grid)
        g = np.exp(-(((grid - 3.0) / 2.5) ** 2)) * np.cos(2 * math.pi * 0.7 * grid)
        g_analytic = scipy.signal.hilbert(g)
        lhs = np.sum(g * np.conj(vals)) * dt
        rhs = np.sum(g_analytic * np.conj(vals.real)) * dt
        assert abs(lhs - rhs) <= 1e-6

    def test_imaginary_tail_decay_exponent(self):
        # |H psi| decays like |t|^-(n+1); the log-log slope approaches
        # -(n+1) from below as t grows (beyond t ~ 100 the recursion
        # cancellation hits the double noise floor, so stop at 64)
        m, n = 4, 3
        ts = np.array([8.0, 16.0, 32.0, 64.0])
        vals = np.abs(analytic_values(m, n, ts).imag)
        slopes = np.diff(np.log(vals)) / np.diff(np.log(ts))
        assert np.all(slopes < -(n + 0.2))
        assert np.all(np.diff(slopes) > 0)
        assert abs(slopes[-1] - (-(n + 1))) < 0.6


class TestSpectrum:
    def test_zero_frequency_vanishes(self):
        w = interior_vm(4, 4)
        report = spectrum_and_slr(w)
        assert report.magnitude[0] == 0.0

    def test_closed_form_pointwise(self):
        # |psi_hat| = (1/2) |w/2|^m |N_hat_{2m}(w/2)| for the half-knot wavelet
        from splinesst.vmwav import _spectrum_magnitude

        m = 4
        w = interior_vm(m, m)
        omega = np.linspace(0.1, 30.0, 57)
        mags = _spectrum_magnitude(w, omega)
        arg = omega / 4.0
        closed = 0.5 * (omega / 2.0) ** m * np.abs(np.sin(arg) / arg) ** (2 * m)
        assert np.max(np.abs(mags - closed)) <= 1e-8

    def test_slr_increasing_with_linear_db_trend(self):
        slrs = []
        for m in range(2, 13):
            w = vm_general_knots(np.arange(0.0, 2 * m + 1.0), m, m, 0)
            slrs.append(spectrum_and_slr(w).slr_db)
        assert np.all(np.diff(slrs) > 0)
        fit = np.corrcoef(np.arange(2, 13), slrs)[0, 1] ** 2
        assert fit >= 0.98


class TestGaussianAsymptotics:
    def test_decreasing_in_total_order(self):
        for n in (1, 2):
            dists = [gaussian_asymptotics_distance(m_tot - n, n) for m_tot in (6, 10, 14, 18)]
            assert all(a > b for a, b in zip(dists, dists[1:]))

    def test_classical_bspline_limit(self):
        d6 = gaussian_asymptotics_distance(6, 0)
        d18 = gaussian_asymptotics_distance(18, 0)
        assert d18 < d6 < 0.1

    def test_finite_for_various_orders(self):
        for m, n in [(2, 1), (3, 3), (5, 2)]:
            assert math.isfinite(gaussian_asymptotics_distance(m, n))


class TestScalePlan:
    def test_boundary_refinement_scale(self):
        plan = boundary_scale_plan(40, 4, 15)
        assert plan.boundary_scale == pytest.approx(7 / 32)

    def test_max_interior_scale(self):
        plan = boundary_scale_plan(30, 4, 15)
        assert plan.max_interior_scale == pytest.approx(5.75)

    def test_interior_supports_contained(self):
        plan = boundary_scale_plan(24, 3, 12)
        assert plan.max_interior_scale * 3 <= 24
        assert plan.admissible(plan.max_interior_scale)
        assert not plan.admissible(plan.max_interior_scale + 0.1)

    def test_too_few_refinement_knots(self):
        with pytest.raises(ValueError):
            boundary_scale_plan(40, 4, 7)

    def test_interval_too_short(self):
        with pytest.raises(ValueError):
            boundary_scale_plan(4, 4, 20)
