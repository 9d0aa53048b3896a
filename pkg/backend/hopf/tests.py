import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase
from scipy.optimize import brentq

from breakup.exceptions import CriticalPointError, MultivaluedRegionError, NearCausticError
from equations.catalog import build_model
from equations.functions import Hyperbolic, monomial
from spectral.models import PeriodicGrid
from spectral.transforms import differentiate
from .characteristics import foot_points, hopf_derivatives, hopf_solve, implicit_residual
from .critical import (
    critical_point, critical_point_for_model, genkdv_critical_values, strength_limit,
)
from .data import sech2_data
from .jets import compose, hopf_jet, revert, series_mul

KDV_SPEED = monomial(6.0, 1)
DATA = sech2_data()


def shooting_oracle(a, x, t):
    """Invert x = xi + t a(phi(xi)) by bisection on a monotone bracket."""
    def solve(target):
        return brentq(lambda xi: xi + t * a(DATA(xi)) - target, target - 10.0, target + 10.0,
                      xtol=1e-15, rtol=1e-15)
    return DATA(np.array([solve(value) for value in np.atleast_1d(x)]))


class InitialDataTests(SimpleTestCase):
    u = np.linspace(0.02, 0.98, 49)

    def test_branches_invert_the_profile(self):
        for name, branch in DATA.branches.items():
            with self.subTest(branch=name):
                assert_allclose(DATA(branch(self.u)), self.u, atol=1e-12)
                x = branch(self.u)
                lo, hi = branch.x_range
                self.assertTrue(np.all((x > lo) & (x < hi)))

    def test_inverse_derivatives(self):
        branch = DATA.branch('right')
        x = branch(self.u)
        p1, p2, p3 = DATA(x, 1), DATA(x, 2), DATA(x, 3)
        assert_allclose(branch(self.u, 1), 1 / p1, rtol=1e-11)
        assert_allclose(branch(self.u, 2), -p2 / p1 ** 3, rtol=1e-10)
        assert_allclose(branch(self.u, 3), (3 * p2 ** 2 - p1 * p3) / p1 ** 5, rtol=1e-9)

    def test_profile_derivatives(self):
        x = np.linspace(-3, 3, 25)
        h = 1e-4
        for order in (1, 2, 3):
            with self.subTest(order=order):
                central = (DATA(x + h, order - 1) - DATA(x - h, order - 1)) / (2 * h)
                assert_allclose(DATA(x, order), central, atol=1e-6)


class HopfSolveTests(SimpleTestCase):
    x = np.linspace(-6, 6, 121)

    def test_initial_time_is_exact(self):
        assert_array_equal(hopf_solve(KDV_SPEED, DATA, self.x, 0.0), DATA(self.x))

    def test_matches_shooting_oracle(self):
        self.assertAlmostEqual(hopf_solve(KDV_SPEED, DATA, 0.0, 0.1),
                               float(shooting_oracle(KDV_SPEED, 0.0, 0.1)[0]), delta=1e-12)
        assert_allclose(hopf_solve(KDV_SPEED, DATA, self.x, 0.1),
                        shooting_oracle(KDV_SPEED, self.x, 0.1), atol=1e-12)

    def test_implicit_residual(self):
        for t in (0.05, 0.15, 0.21):
            u = hopf_solve(KDV_SPEED, DATA, self.x, t)
            self.assertLess(np.max(implicit_residual(KDV_SPEED, DATA, self.x, t, u)), 1e-12)

    def test_close_to_breakup_uses_newton(self):
        t_c = genkdv_critical_values(1)[1]
        t = t_c * (1 - 1e-6)
        u = hopf_solve(KDV_SPEED, DATA, self.x, t)
        self.assertLess(np.max(implicit_residual(KDV_SPEED, DATA, self.x, t, u)), 1e-12)

    def test_past_breakup_reports_fold(self):
        point = critical_point(KDV_SPEED)
        t = 0.4
        x_fold = DATA.branch('right')(point.u_c) + t * KDV_SPEED(point.u_c)
        with self.assertRaises(MultivaluedRegionError) as ctx:
            hopf_solve(KDV_SPEED, DATA, np.array([x_fold, -3.0]), t)
        lo, hi = ctx.exception.bracket
        self.assertLess(lo, x_fold)
        self.assertGreater(hi, x_fold)

    def test_negative_speed(self):
        speed = monomial(-6.0, 1)
        assert_allclose(hopf_solve(speed, DATA, self.x, 0.1),
                        shooting_oracle(speed, self.x, 0.1), atol=1e-12)


class HopfDerivativeTests(SimpleTestCase):
    def test_initial_time(self):
        x = np.linspace(-4, 4, 33)
        u_x, u_xx, u_xxx = hopf_derivatives(KDV_SPEED, DATA, x, 0.0)
        assert_allclose(u_x, DATA(x, 1), rtol=1e-15, atol=1e-16)
        assert_allclose(u_xx, DATA(x, 2), rtol=1e-14, atol=1e-15)
        assert_allclose(u_xxx, DATA(x, 3), rtol=1e-14, atol=1e-14)

    def test_against_spectral_derivatives(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 11)
        t = 0.1
        u = hopf_solve(KDV_SPEED, DATA, grid.nodes, t)
        derivatives = hopf_derivatives(KDV_SPEED, DATA, grid.nodes, t)
        for order, exact in enumerate(derivatives, start=1):
            with self.subTest(order=order):
                spectral = differentiate(grid, u, order)
                scale = max(1.0, np.max(np.abs(exact)))
                self.assertLess(np.max(np.abs(spectral - exact)), 1e-8 * scale)

    def test_gradient_blows_up_like_inverse_time(self):
        point = critical_point(KDV_SPEED)
        xi_c = DATA.branch('right')(point.u_c)
        products = []
        for gap in (1e-3, 1e-4, 1e-5):
            t = point.t_c * (1 - gap)
            x = xi_c + t * KDV_SPEED(point.u_c)
            u_x, _, _ = hopf_derivatives(KDV_SPEED, DATA, x, t)
            products.append(u_x * (point.t_c - t))
        self.assertLess(products[0], 0)
        assert_allclose(products, DATA(xi_c, 1) * point.t_c, rtol=1e-6)

    def test_caustic_detected(self):
        point = critical_point(KDV_SPEED)
        with self.assertRaises(NearCausticError):
            hopf_derivatives(KDV_SPEED, DATA, point.x_c, point.t_c, caustic_tol=1e-4)


class CriticalPointTests(SimpleTestCase):
    def test_kdv_values(self):
        point = critical_point(KDV_SPEED)
        self.assertAlmostEqual(point.u_c, 2 / 3, places=12)
        self.assertAlmostEqual(point.t_c, 3 ** 1.5 / 24, places=12)
        self.assertAlmostEqual(point.x_c, 1.5245, places=4)
        self.assertAlmostEqual(point.k, 3 ** 4.5 / 96, places=10)
        self.assertEqual(point.branch, 'right')

    def test_genkdv_closed_forms(self):
        for n in range(1, 6):
            with self.subTest(n=n):
                point = critical_point_for_model(build_model('genkdv', n=n))
                assert_allclose((point.u_c, point.t_c, point.k), genkdv_critical_values(n),
                                rtol=1e-10)

    def test_sinh_speed_residuals(self):
        point = critical_point(Hyperbolic(6.0, 'sinh'))
        self.assertLess(max(point.residuals), 1e-10)
        self.assertGreater(point.k, 0)

    def test_strength_limit_matches_derivative_formula(self):
        point = critical_point(KDV_SPEED)
        self.assertAlmostEqual(point.k_limit, 6 * point.k)
        self.assertFalse(point.disagreement)
        estimate = strength_limit(KDV_SPEED, DATA.branch('right'), point.u_c, point.t_c, point.x_c)
        assert_allclose(estimate, point.k_limit, rtol=1e-6)

    def test_kdv2_family_breaks_earlier(self):
        point = critical_point_for_model(build_model('kdv2', alpha=0.5))
        assert_allclose(point.t_c, genkdv_critical_values(2)[1] / 5, rtol=1e-10)

    def test_foot_of_critical_characteristic(self):
        point = critical_point(KDV_SPEED)
        t = 0.5 * point.t_c
        x = DATA.branch('right')(point.u_c) + t * KDV_SPEED(point.u_c)
        assert_allclose(foot_points(KDV_SPEED, DATA, x, t), DATA.branch('right')(point.u_c),
                        atol=1e-12)

    def test_no_breakup_for_constant_speed(self):
        with self.assertRaises(CriticalPointError):
            critical_point(monomial(6.0, 0))


class JetTests(SimpleTestCase):
    def test_series_algebra(self):
        one_plus = np.array([[1.0], [1.0], [0.0], [0.0]])
        assert_allclose(series_mul(one_plus, one_plus)[:, 0], [1, 2, 1, 0])
        exp_taylor = np.array([[1.0], [1.0], [0.5], [1 / 6]])
        s = np.array([[0.0], [1.0], [0.0], [0.0]])
        assert_allclose(compose(exp_taylor, 2 * s)[:, 0], [1, 2, 2, 4 / 3])
        # s = h - h^2 + 2 h^3 inverts h = s + s^2
        assert_allclose(revert(np.array([[0.0], [1.0], [1.0], [0.0]]))[:, 0], [0, 1, -1, 2])

    def test_initial_time_is_the_profile(self):
        x = np.linspace(-3, 3, 13)
        jet = hopf_jet(KDV_SPEED, DATA, x, 0.0, order=6)
        for order in range(7):
            assert_allclose(jet[order], DATA(x, order), rtol=1e-12, atol=1e-12)

    def test_matches_closed_form_derivatives(self):
        x = np.linspace(-2, 4, 61)
        t = 0.1
        jet = hopf_jet(KDV_SPEED, DATA, x, t, order=4)
        assert_allclose(jet[0], hopf_solve(KDV_SPEED, DATA, x, t), rtol=1e-15)
        for order, closed in enumerate(hopf_derivatives(KDV_SPEED, DATA, x, t), start=1):
            with self.subTest(order=order):
                assert_allclose(jet[order], closed, rtol=1e-9, atol=1e-9)
        h = 1e-4
        _, _, plus = hopf_derivatives(KDV_SPEED, DATA, x + h, t)
        _, _, minus = hopf_derivatives(KDV_SPEED, DATA, x - h, t)
        assert_allclose(jet[4], (plus - minus) / (2 * h), rtol=1e-5, atol=1e-4)

    def test_scalar_point(self):
        jet = hopf_jet(KDV_SPEED, DATA, 1.0, 0.1, order=3)
        self.assertEqual(jet.shape, (4,))
