import dataclasses
import math

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase, tag
from scipy import optimize

from breakup.exceptions import (DegenerateDispersionError, GenericityError, NearCausticError,
                                NearCriticalError, OutOfWindowError)
from equations.catalog import build_model
from equations.functions import ZERO, Constant, monomial, polynomial
from hopf.characteristics import foot_points, hopf_derivatives, hopf_solve
from hopf.critical import critical_point_for_model, genkdv_critical_values
from hopf.data import sech2_data
from hopf.jets import compose, hopf_jet, series_derivative, series_mul, series_reciprocal, taylor
from pi2.models import PI2Table
from pi2.tabulate import assemble_spline, pi2_tabulate
from spectral.models import PeriodicGrid
from stepping.evolve import evolve
from stepping.models import Monitors
from .multiscale import multiscale_constants, multiscale_eval, required_times, trust_window
from .quasitriv import (correction_rhs, corrected_hopf, data_correction, discrepancy_leading,
                        hopf_discrepancy, quasitriv_data, quasitriv_solution,
                        quasitriv_transform, transform_bracket, window_jet)

DATA = sech2_data()
KDV = build_model('genkdv', n=1)
UNIT_SPEED = monomial(1.0, 1)


def sech2(x):
    return 1.0 / np.cosh(x) ** 2


def kdv_constants():
    return multiscale_constants(KDV, critical_point_for_model(KDV))


def synthetic_table(T_values=(0.0,)):
    """A table of U = tanh(X) - 1 at every T; enough to test the argument mapping."""
    X = np.linspace(-50, 50, 2001)
    values = np.column_stack([np.tanh(X) - 1.0 for _ in T_values])
    return PI2Table(T_values=tuple(T_values), X=X, values=values,
                    residuals=tuple(0.0 for _ in T_values), x_max=50.0, nodes=X.size,
                    spline=assemble_spline(X, tuple(T_values), values))


def _composed(func, series, shift=0):
    order = series.shape[0] - 1
    return compose(taylor(lambda u, m: func(u, shift + m), series[0], order), series)


def measured_discrepancy(c, x, t, eps, order=10):
    """R/eps^4 for u = v + eps^2 bracket(v), R the residual of the nonlinear-dispersion equation.

    v solves v_t + v v_x = 0, so every x- and t-derivative of u is available as an
    exact truncated Taylor series around each point.
    """
    jet = hopf_jet(UNIT_SPEED, DATA, x, t, order=order)
    V = jet / np.array([math.factorial(k) for k in range(order + 1)], dtype=float)[:, None]
    D = series_derivative
    V1, V2, V3 = D(V), D(V, 2), D(V, 3)
    C = [_composed(c, V, shift) for shift in range(4)]
    inv = series_reciprocal(V1)
    inv2 = series_mul(inv, inv)
    V2sq = series_mul(V2, V2)
    ratio = series_mul(V3, inv) - series_mul(V2sq, inv2)
    V1sq = series_mul(V1, V1)
    Q = 0.5 * series_mul(C[0], ratio) + series_mul(C[1], V2) + 0.5 * series_mul(C[2], V1sq)

    Vt = -series_mul(V, V1)
    dQ_dv = (0.5 * series_mul(C[1], ratio) + series_mul(C[2], V2)
             + 0.5 * series_mul(C[3], V1sq))
    dQ_dv1 = (0.5 * series_mul(C[0], 2 * series_mul(V2sq, series_mul(inv2, inv))
                               - series_mul(V3, inv2))
              + series_mul(C[2], V1))
    dQ_dv2 = -series_mul(C[0], series_mul(V2, inv2)) + C[1]
    dQ_dv3 = 0.5 * series_mul(C[0], inv)
    Qt = (series_mul(dQ_dv, Vt) + series_mul(dQ_dv1, D(Vt)) + series_mul(dQ_dv2, D(Vt, 2))
          + series_mul(dQ_dv3, D(Vt, 3)))

    U = V + eps ** 2 * Q
    Ut = Vt + eps ** 2 * Qt
    U1 = D(U)
    flux = (series_mul(_composed(c, U), D(U, 2))
            + 0.5 * series_mul(_composed(c, U, 1), series_mul(U1, U1)))
    residual = Ut + series_mul(U, U1) + eps ** 2 * D(flux)
    return residual[0] / eps ** 4, jet


class MultiscaleConstantsTests(SimpleTestCase):
    def test_seventh_power_identities(self):
        models = (KDV, build_model('genkdv', n=2), build_model('kawahara', alpha=2.0, beta=1.0))
        for model in models:
            with self.subTest(model=model.name):
                constants = multiscale_constants(model, critical_point_for_model(model))
                self.assertLess(max(constants.identity_defects()), 1e-12)

    def test_kdv_values(self):
        u_c, t_c, k = genkdv_critical_values(1)
        constants = kdv_constants()
        k_limit = 6 * k
        assert_allclose(constants.alpha, (12 / (6 * k_limit ** 2)) ** (1 / 7), rtol=1e-9)
        assert_allclose(constants.beta, (12 ** 3 * k_limit / 6 ** 3) ** (1 / 7), rtol=1e-9)
        assert_allclose(constants.gamma, (12 ** 2 * k_limit ** 3 / 6 ** 9) ** (1 / 7), rtol=1e-9)
        self.assertAlmostEqual(constants.a0, 6 * u_c, places=9)
        self.assertAlmostEqual(constants.b1, 1.0, places=14)
        self.assertAlmostEqual(constants.alpha, 0.594, places=2)
        self.assertAlmostEqual(constants.beta, 1.835, places=2)
        self.assertAlmostEqual(constants.gamma, 0.515, places=2)

    def test_far_field_matches_cube_root(self):
        constants = kdv_constants()
        self.assertAlmostEqual(constants.alpha ** 3 / constants.beta, 1 / constants.k, places=12)

    def test_kawahara_unit_alpha_matches_kdv(self):
        kawahara = build_model('kawahara', alpha=1.0, beta=0.7)
        constants = multiscale_constants(kawahara, critical_point_for_model(kawahara))
        reference = kdv_constants()
        for name in ('alpha', 'beta', 'gamma', 'a0', 'u_c', 't_c'):
            with self.subTest(name=name):
                assert_allclose(getattr(constants, name), getattr(reference, name), rtol=1e-9)

    def test_strength_scaling(self):
        point = critical_point_for_model(KDV)
        reference = multiscale_constants(KDV, point)
        stronger = multiscale_constants(KDV, dataclasses.replace(point, k_limit=4 * point.k_limit))
        assert_allclose(stronger.alpha, reference.alpha * 4 ** (-2 / 7), rtol=1e-12)
        assert_allclose(stronger.beta, reference.beta * 4 ** (1 / 7), rtol=1e-12)
        assert_allclose(stronger.gamma, reference.gamma * 4 ** (3 / 7), rtol=1e-12)

    def test_vanishing_dispersion_is_degenerate(self):
        kawahara = build_model('kawahara', alpha=0.0, beta=1.0)
        with self.assertRaises(DegenerateDispersionError):
            multiscale_constants(kawahara, critical_point_for_model(kawahara))

    def test_wrong_sign_strength_is_not_generic(self):
        point = critical_point_for_model(KDV)
        with self.assertRaises(GenericityError):
            multiscale_constants(KDV, dataclasses.replace(point, k_limit=-point.k_limit))


class MultiscaleEvalTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.constants = kdv_constants()
        cls.table = synthetic_table()

    def test_breakup_point_maps_to_origin(self):
        eps = 1e-2
        X, T = self.constants.scaled(self.constants.x_c, self.constants.t_c, eps)
        self.assertEqual(float(X), 0.0)
        self.assertEqual(float(T), 0.0)
        value = multiscale_eval(self.constants.x_c, self.constants.t_c, eps, self.constants,
                                self.table)
        self.assertAlmostEqual(float(value),
                               self.constants.u_c - self.constants.alpha * eps ** (2 / 7),
                               places=12)

    def test_argument_collapse(self):
        c = self.constants
        eps = 3e-3
        X = np.linspace(-2.5, 2.5, 11)
        x = c.x_c + c.beta * eps ** (6 / 7) * X
        expected = c.u_c + c.alpha * eps ** (2 / 7) * (np.tanh(X) - 1)
        assert_allclose(multiscale_eval(x, c.t_c, eps, c, self.table), expected, atol=1e-7)

    def test_window_edge_is_inside(self):
        eps = 1e-2
        half_x, _ = trust_window(self.constants, eps)
        x = self.constants.x_c + half_x
        multiscale_eval(x, self.constants.t_c, eps, self.constants, self.table)

    def test_outside_window(self):
        eps = 1e-2
        half_x, half_t = trust_window(self.constants, eps)
        with self.assertRaises(OutOfWindowError):
            multiscale_eval(self.constants.x_c + 1.01 * half_x, self.constants.t_c, eps,
                            self.constants, self.table)
        with self.assertRaises(OutOfWindowError):
            multiscale_eval(self.constants.x_c, self.constants.t_c + 1.01 * half_t, eps,
                            self.constants, self.table)

    def test_uncovered_time(self):
        eps = 1e-2
        t = self.constants.t_c + 0.5 * self.constants.gamma * eps ** (4 / 7)
        assert_allclose(required_times(self.constants, t, eps), [0.5], rtol=1e-12)
        with self.assertRaises(OutOfWindowError):
            multiscale_eval(self.constants.x_c, t, eps, self.constants, self.table)
        wide = synthetic_table((-1.0, 0.0, 1.0))
        self.assertTrue(np.isfinite(multiscale_eval(self.constants.x_c, t, eps,
                                                    self.constants, wide)))


class QuasitrivTransformTests(SimpleTestCase):
    x = np.linspace(1.1, 2.0, 10)
    t = 0.05

    def test_zero_dispersion_is_identity(self):
        jet = (np.linspace(0.2, 0.4, 5), -np.ones(5), np.zeros(5), np.zeros(5))
        assert_array_equal(quasitriv_transform(jet, ZERO, 0.1), jet[0])

    def test_flat_background_rejected(self):
        jet = (np.full(5, 0.5), np.zeros(5), np.zeros(5), np.zeros(5))
        with self.assertRaises(NearCriticalError):
            quasitriv_transform(jet, Constant(1 / 6), 0.1)

    def test_bracket_for_constant_dispersion(self):
        v = hopf_solve(KDV.a, DATA, self.x, self.t)
        v1, v2, v3 = hopf_derivatives(KDV.a, DATA, self.x, self.t)
        eps = 0.05
        expected = v + eps ** 2 / 12 * (v3 / v1 - v2 ** 2 / v1 ** 2)
        assert_allclose(quasitriv_transform((v, v1, v2, v3), KDV.c, eps), expected, rtol=1e-13)

    def test_window_jet_matches_characteristics(self):
        grid = PeriodicGrid(8 * np.pi, 1024)
        field = grid.sample(sech2)
        nodes, jet = window_jet(field, (1.1, 2.0))
        self.assertTrue(np.all((nodes >= 1.1) & (nodes <= 2.0)))
        self.assertEqual(len(jet), 4)
        assert_allclose(jet[0], sech2(nodes), rtol=1e-14)
        assert_allclose(jet[1], -2 * np.tanh(nodes) * sech2(nodes), atol=1e-10)


class CorrectedDataTests(SimpleTestCase):
    x = np.linspace(1.1, 2.0, 10)

    def test_zero_time_shifts_the_profile(self):
        eps = 0.1
        corrected = corrected_hopf(DATA, KDV.c, KDV.a, self.x, 0.0, eps)
        jet = tuple(sech2(self.x) if k == 0 else DATA(self.x, k) for k in range(4))
        expected = sech2(self.x) - eps ** 2 * transform_bracket(jet, KDV.c)
        assert_allclose(corrected, expected, rtol=1e-12)

    def test_zero_time_solution_is_the_profile(self):
        u = quasitriv_solution(DATA, KDV, self.x, 0.0, 0.1)
        assert_allclose(u, sech2(self.x), atol=1e-12)

    def test_zero_eps_is_dispersionless(self):
        t = 0.05
        assert_array_equal(quasitriv_solution(DATA, KDV, self.x, t, 0.0),
                           hopf_solve(KDV.a, DATA, self.x, t))

    def test_shift_agrees_with_inverse_branch_form(self):
        t = 0.05
        quasi = quasitriv_data(DATA, KDV.c, KDV.a, self.x, t, 0.1)
        branch = DATA.branch('right')
        self.assertTrue(np.all(foot_points(KDV.a, DATA, self.x, t) > 0))
        expected = -correction_rhs(branch, KDV.c, quasi.v) / (branch(quasi.v, 1)
                                                             + t * KDV.a(quasi.v, 1))
        assert_allclose(quasi.w, expected, rtol=1e-9)

    def test_shift_tracks_flow_of_shifted_data(self):
        t = 0.05
        xi0 = foot_points(KDV.a, DATA, self.x, t)
        errors = []
        for eps in (0.1, 0.05):
            def shifted(xi):
                return DATA(xi) - eps ** 2 * data_correction(DATA, KDV.c, xi)

            direct = []
            for x, guess in zip(self.x, xi0):
                xi = optimize.brentq(lambda s: s + t * KDV.a(shifted(s)) - x,
                                     guess - 0.2, guess + 0.2, xtol=1e-15, rtol=1e-15)
                direct.append(shifted(xi))
            approx = corrected_hopf(DATA, KDV.c, KDV.a, self.x, t, eps)
            errors.append(np.max(np.abs(approx - np.array(direct))))
        self.assertLess(errors[0], 1e-3)
        self.assertGreater(errors[0] / errors[1], 10)

    def test_breakup_time_rejected(self):
        point = critical_point_for_model(KDV)
        with self.assertRaises(NearCausticError):
            quasitriv_solution(DATA, KDV, self.x, point.t_c, 0.1, t_c=point.t_c)


class DiscrepancyTests(SimpleTestCase):
    x = np.linspace(1.0, 2.0, 6)
    t = 0.3

    def test_linear_background_has_no_discrepancy(self):
        jet = (np.linspace(0.1, 0.5, 4), np.full(4, -0.7)) + tuple(np.zeros(4) for _ in range(5))
        assert_array_equal(discrepancy_leading(jet, Constant(0.4)), np.zeros(4))

    def test_constant_dispersion_matches_series_residual(self):
        c = Constant(1 / 6)
        measured, jet = measured_discrepancy(c, self.x, self.t, 0.1)
        printed = discrepancy_leading(jet[:7], c)
        scale = np.max(np.abs(printed))
        self.assertGreater(scale, 0)
        assert_allclose(measured, printed, rtol=1e-7, atol=1e-8 * scale)

    def test_dispersionless_jet_gives_series_residual(self):
        model = build_model('nonlinear-dispersion', c=[0.25], p=[0.0])
        measured, _ = measured_discrepancy(model.c, self.x, self.t, 0.1)
        leading = hopf_discrepancy(DATA, model, self.x, self.t)
        assert_allclose(leading, measured, rtol=1e-7, atol=1e-8 * np.max(np.abs(measured)))

    def test_variable_dispersion_converges_to_printed_form(self):
        c = polynomial(1 / 6, 0.1, 0.05, 0.02, 0.01, 0.005)
        errors = []
        for eps in (0.02, 0.01):
            measured, jet = measured_discrepancy(c, self.x, self.t, eps)
            printed = discrepancy_leading(jet[:7], c)
            errors.append(np.max(np.abs(measured - printed)))
        self.assertLess(errors[1], 1e-2 * np.max(np.abs(printed)))
        self.assertLess(errors[1], 0.4 * errors[0])


@tag('slow')
class MultiscaleAgainstSolverTests(SimpleTestCase):
    def compare_at_breakup(self, model, eps):
        constants = multiscale_constants(model, critical_point_for_model(model))
        t = constants.t_c
        table = pi2_tabulate([0.0])
        grid = PeriodicGrid(8 * np.pi, 2 ** 14)
        record = evolve(model, grid.sample(sech2), eps, t, 1e-4, monitors=Monitors(every=200))
        X, T = constants.scaled(grid.nodes, t, eps)
        assert_allclose(T, 0.0, atol=1e-12)
        inside = np.abs(X) <= 3.0
        x, u = grid.nodes[inside], record.final.values[inside]
        multiscale = multiscale_eval(x, t, eps, constants, table)
        dispersionless = hopf_solve(model.a, DATA, x, t)
        return np.max(np.abs(u - multiscale)), np.max(np.abs(u - dispersionless))

    def test_kdv_at_breakup_time(self):
        multiscale, dispersionless = self.compare_at_breakup(KDV, 1e-2)
        self.assertLessEqual(multiscale, 0.7 * dispersionless)

    def test_kawahara_at_breakup_time(self):
        model = build_model('kawahara', alpha=1.0, beta=-1.0)
        multiscale, dispersionless = self.compare_at_breakup(model, 1e-2)
        self.assertLessEqual(multiscale, 0.7 * dispersionless)
