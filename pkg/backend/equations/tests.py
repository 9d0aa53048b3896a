import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase
from scipy import fft

from breakup.exceptions import ModelConfigurationError, SingularInvariantError
from hamiltonian.variational import euler_lagrange
from spectral.models import PeriodicGrid
from spectral.transforms import derivative, differentiate, to_spectral
from .catalog import build_model
from .functions import Constant, Explicit, Hyperbolic, Power, TanhPolynomial, monomial, polynomial
from .models import ModelKind
from .rhs import invariants_cp, rhs, rhs_linear, rhs_nonlinear

U = np.linspace(0.1, 1.0, 19)


def sech2(x):
    return 1.0 / np.cosh(x) ** 2


def catalog():
    return [
        build_model('genkdv', n=1), build_model('genkdv', n=2), build_model('genkdv', n=4),
        build_model('sinh-kdv'),
        build_model('kawahara', alpha=1.0, beta=1.0), build_model('kawahara', alpha=0.0, beta=-1.0),
        build_model('kdv2', alpha=0.5), build_model('kdv2', alpha=-1.0),
        build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0),
        build_model('nonlinear-dispersion', c=[1.0, 0.5], p=[0.0, 0.0, -1.0]),
    ]


class SmoothFunctionTests(SimpleTestCase):
    def test_product_rule(self):
        f = polynomial(1.0, 2.0, 3.0) * Hyperbolic(1.0, 'sinh')
        expected = (2 + 6 * U) * np.sinh(U) + (1 + 2 * U + 3 * U ** 2) * np.cosh(U)
        assert_allclose(f(U, 1), expected, rtol=1e-14)

    def test_reciprocal_second_derivative(self):
        f = polynomial(1.0, 1.0).reciprocal()
        assert_allclose(f(U, 2), 2 / (1 + U) ** 3, rtol=1e-13)

    def test_power_derivatives(self):
        f = Power(0.5, -1)
        assert_allclose(f(U, 3), -3.0 / U ** 4, rtol=1e-14)

    def test_zero_simplification(self):
        self.assertTrue((Constant(0.0) * monomial(1.0, 3)).is_zero)
        square = monomial(1.0, 2)
        self.assertIs(square + Constant(0.0), square)
        self.assertTrue(monomial(1.0, 2).derivative(3).is_zero)

    def test_explicit_derivatives(self):
        f = Explicit((np.sin, np.cos, lambda u: -np.sin(u)), label='sin')
        assert_allclose(f(U, 2), -np.sin(U))
        with self.assertRaises(ValueError):
            f.derivative(3)

    def test_tanh_polynomial_derivatives(self):
        sech2 = TanhPolynomial([1.0, 0.0, -1.0])
        x = np.linspace(-3, 3, 13)
        s2, t = 1 / np.cosh(x) ** 2, np.tanh(x)
        assert_allclose(sech2(x), s2, rtol=1e-14)
        assert_allclose(sech2(x, 1), -2 * s2 * t, atol=1e-15)
        assert_allclose(sech2(x, 2), 4 * s2 * t ** 2 - 2 * s2 ** 2, atol=1e-14)
        h = 1e-3
        for order, atol in ((4, 1e-3), (6, 1e-1)):
            central = (sech2(x + h, order - 1) - sech2(x - h, order - 1)) / (2 * h)
            assert_allclose(sech2(x, order), central, atol=atol)

    def test_integer_powers(self):
        f = polynomial(1.0, 1.0) ** 3
        assert_allclose(f(U, 1), 3 * (1 + U) ** 2, rtol=1e-14)


class BuildModelTests(SimpleTestCase):
    def test_kdv(self):
        model = build_model('genkdv', n=1)
        assert_allclose(model.a(U), 6 * U)
        assert_allclose(model.c(U), 1 / 6)
        assert_allclose(model.p(U), 0.0, atol=1e-15)
        self.assertEqual(model.kind, ModelKind.GEN_KDV)

    def test_kdv_linear_symbol(self):
        model = build_model('genkdv', n=1)
        k = np.array([0.5, 1.0, 2.0])
        assert_allclose(model.linear_symbol(k, 0.1), 1j * 0.01 * k ** 3)

    def test_kawahara_invariants(self):
        model = build_model('kawahara', alpha=1.0, beta=-1.0)
        assert_allclose(model.c(U), 1 / 6)
        assert_allclose(model.p(U), -1 / 12)
        assert_allclose(model.b1(U), 1.0)

    def test_kdv2_family_integrable_case_has_no_p(self):
        model = build_model('kdv2', alpha=1.0)
        assert_allclose(model.p(U), 0.0, atol=1e-16)

    def test_nonlinear_dispersion_has_no_stiff_part(self):
        model = build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0)
        self.assertFalse(model.has_stiff_linear_part)
        assert_allclose(model.linear_symbol(np.arange(4.0), 0.1), 0.0)

    def test_frozen_symbol_adds_transport(self):
        model = build_model('kawahara', alpha=1.0, beta=1.0)
        k = np.array([1.0, 3.0])
        expected = -1j * k * 6 * 0.4 + model.linear_symbol(k, 0.2)
        assert_allclose(model.frozen_symbol(k, 0.2, 0.4), expected)

    def test_invalid_parameters(self):
        with self.assertRaises(ModelConfigurationError):
            build_model('genkdv', n=0)
        with self.assertRaises(ModelConfigurationError):
            build_model('kawahara', alpha=1.0, beta=0.0)
        with self.assertRaises(ModelConfigurationError):
            build_model('camassa-holm')
        with self.assertRaises(ModelConfigurationError):
            build_model('nonlinear-dispersion', c='u squared', p=0.0)

    def test_vanishing_speed_on_range_rejected(self):
        with self.assertRaises(ModelConfigurationError):
            build_model('genkdv', n=2, u_range=(-0.5, 0.5))

    def test_models_compare_by_name(self):
        self.assertEqual(build_model('kdv2', alpha=0.5), build_model('kdv2', alpha=0.5))
        self.assertNotEqual(build_model('kdv2', alpha=0.5), build_model('kdv2', alpha=-0.5))
        self.assertEqual(len({build_model('genkdv', n=1), build_model('genkdv', n=1)}), 1)


class InvariantTests(SimpleTestCase):
    def test_kdv(self):
        table = invariants_cp(build_model('genkdv', n=1), U)
        assert_allclose(table.c, 1 / 6)
        assert_allclose(table.p, 0.0, atol=1e-15)

    def test_genkdv_formula(self):
        table = invariants_cp(build_model('genkdv', n=3), U)
        assert_allclose(table.c, 1 / (18 * U ** 2), rtol=1e-13)
        assert_allclose(table.p, -0.3 * 36 * U / (18 * U ** 2) ** 3, rtol=1e-13)

    def test_kawahara(self):
        table = invariants_cp(build_model('kawahara', alpha=2.0, beta=-1.0), U)
        assert_allclose(table.c, 1 / 3)
        assert_allclose(table.p, -1 / 12)

    def test_kdv2_family_at_one(self):
        table = invariants_cp(build_model('kdv2', alpha=0.5), [1.0])
        self.assertAlmostEqual(table.p[0], 0.00625, places=15)

    def test_singular_sample(self):
        with self.assertRaises(SingularInvariantError) as ctx:
            invariants_cp(build_model('genkdv', n=2), [0.5, 0.0])
        self.assertEqual(ctx.exception.details['u'], 0.0)


class RhsTests(SimpleTestCase):
    smooth = PeriodicGrid(np.pi, 128)

    def smooth_field(self):
        return self.smooth.sample(lambda x: 0.5 + 0.3 * np.sin(x) + 0.1 * np.cos(2 * x))

    def test_constant_is_a_fixed_point(self):
        u = self.smooth.field(np.full(128, 0.8))
        assert_allclose(rhs(build_model('genkdv', n=1), u, 0.1).values, 0.0, atol=1e-13)

    def test_kawahara_linear_phase(self):
        L, eps = 8 * np.pi, 0.3
        grid = PeriodicGrid(L, 256)
        model = build_model('kawahara', alpha=1.0, beta=1.0)
        k = np.pi / L
        omega = eps ** 4 * k ** 5 - eps ** 2 * k ** 3
        t = 0.37
        u_hat = to_spectral(grid.sample(lambda x: np.cos(k * x))).coeffs
        evolved = fft.ifft(np.exp(model.linear_symbol_on(grid, eps) * t) * u_hat).real
        assert_allclose(evolved, np.cos(k * grid.nodes - omega * t), atol=1e-10)

    def test_nonlinear_dispersion_against_direct_assembly(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 10)
        eps = 0.1
        u = grid.sample(sech2)
        u1, u2, u3 = (derivative(u, m).values for m in (1, 2, 3))
        v = u.values
        expected = -(v * u1 + eps ** 2 * (4 * v * u1 * u2 + v ** 2 * u3 + u1 ** 3))
        model = build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0)
        self.assertLess(np.max(np.abs(rhs(model, u, eps).values - expected)), 1e-9)

    def test_mass_is_conserved(self):
        u = self.smooth_field()
        for model in catalog():
            with self.subTest(model=model.name):
                values = rhs(model, u, 0.3).values
                scale = np.sum(np.abs(values)) * self.smooth.spacing
                self.assertLess(abs(np.sum(values) * self.smooth.spacing), 1e-12 * scale)

    def test_split_matches_monolithic(self):
        u = self.smooth_field()
        for model in catalog():
            with self.subTest(model=model.name):
                split = rhs_linear(model, u, 0.3).values + rhs_nonlinear(model, u, 0.3).values
                assert_allclose(split, rhs(model, u, 0.3).values, atol=1e-10)

    def test_hamiltonian_consistency(self):
        u = self.smooth_field()
        eps = 0.3
        for model in catalog():
            with self.subTest(model=model.name):
                grad = euler_lagrange(model.density, u, eps).values
                expected = -differentiate(self.smooth, grad, 1)
                assert_allclose(rhs(model, u, eps).values, expected, atol=1e-8)

    def test_unresolved_field_is_flagged(self):
        grid = PeriodicGrid(np.pi, 32)
        rng = np.random.default_rng(0)
        u = grid.field(0.5 + 0.1 * rng.standard_normal(32))
        with self.assertLogs('equations.rhs', level='WARNING'):
            result = rhs(build_model('genkdv', n=1), u, 0.1)
        self.assertIn('unresolved', result.flags)
