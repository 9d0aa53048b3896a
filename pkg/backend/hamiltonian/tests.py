import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from breakup.exceptions import ObstructionError
from equations.catalog import build_model
from equations.functions import Constant, monomial, polynomial
from spectral.models import PeriodicGrid
from .coefficients import check_coefficients, check_model
from .densities import (
    CUBIC, commuting_coefficients, extension_alpha, extension_commuting_density,
    extension_hamiltonian, hf_density, order6_extension,
)
from .models import DensityTerm, HamiltonianDensity
from .scaling import (
    bracket_grid, bracket_scaling, default_test_field, minimum_slope, obstruction_demo,
    random_polynomial, random_test_fields, scaling_of,
)
from .variational import euler_lagrange, functional_value, poisson_bracket

U_SAMPLES = np.linspace(0.1, 1.0, 37)


def quadratic_density(rng, tag):
    """Random density quadratic in the jet with polynomial coefficients."""
    return HamiltonianDensity((
        DensityTerm(polynomial(*rng.uniform(-1, 1, 3))),
        DensityTerm(polynomial(*rng.uniform(-1, 1, 2)), (2, 0, 0), 2),
        DensityTerm(polynomial(*rng.uniform(-1, 1, 2)), (0, 2, 0), 4),
    ), tag=tag)


class DensityPartialTests(SimpleTestCase):
    def test_partials_match_central_differences(self):
        rng = np.random.default_rng(7)
        density = HamiltonianDensity((
            DensityTerm(polynomial(0.2, -0.5, 1.0, 0.3)),
            DensityTerm(polynomial(1.0, 0.4), (2, 0, 0), 2),
            DensityTerm(monomial(0.7, 2), (1, 1, 0), 2),
            DensityTerm(Constant(-0.25), (0, 2, 0), 4),
            DensityTerm(polynomial(0.5, 1.0), (0, 0, 2), 6),
            DensityTerm(Constant(0.1), (0, 3, 0), 6),
        ))
        eps = 0.3
        for _ in range(5):
            jet = list(rng.uniform(0.2, 1.0, 4))
            for variable in range(4):
                h = 1e-6
                up, down = list(jet), list(jet)
                up[variable] += h
                down[variable] -= h
                numeric = (density.h(*up, eps=eps) - density.h(*down, eps=eps)) / (2 * h)
                analytic = density.partial(variable, *jet, eps=eps)
                self.assertAlmostEqual(float(analytic), float(numeric),
                                       delta=1e-6 * max(1.0, abs(float(numeric))))

    def test_order_part_splits_by_eps_power(self):
        density = hf_density(monomial(1 / 24, 4), Constant(1 / 6), monomial(1 / 12, 1))
        self.assertEqual(density.eps_powers, [0, 2, 4])
        self.assertEqual(len(density.order_part(4).terms), 2)


class EulerLagrangeTests(SimpleTestCase):
    grid = PeriodicGrid(np.pi, 64)

    def setUp(self):
        self.u = self.grid.sample(lambda x: 0.5 + 0.3 * np.sin(x) + 0.1 * np.cos(2 * x))

    def test_cubic_density(self):
        density = HamiltonianDensity((DensityTerm(CUBIC),))
        assert_allclose(euler_lagrange(density, self.u, 1.0).values, self.u.values ** 2 / 2,
                        atol=1e-13)

    def test_constant_c_quadratic_term(self):
        eps = 0.2
        density = HamiltonianDensity((DensityTerm(Constant(-0.5 / 6), (2, 0, 0), 2),))
        x = self.grid.nodes
        u_xx = -0.3 * np.sin(x) - 0.4 * np.cos(2 * x)
        assert_allclose(euler_lagrange(density, self.u, eps).values, eps ** 2 / 6 * u_xx,
                        atol=1e-10)

    def test_total_derivatives_are_null_lagrangians(self):
        rng = np.random.default_rng(3)
        for _ in range(4):
            q = polynomial(*rng.uniform(-1, 1, 4))
            # d/dx [q(u) u_x^2] = q' u_x^3 + 2 q u_x u_xx
            density = HamiltonianDensity((
                DensityTerm(q.derivative(), (3, 0, 0), 2),
                DensityTerm(2.0 * q, (1, 1, 0), 2),
            ))
            assert_allclose(euler_lagrange(density, self.u, 0.5).values, 0.0, atol=1e-10)

    def test_u_times_u_x_derivative(self):
        # d/dx (u u_x) = u_x^2 + u u_xx
        density = HamiltonianDensity((
            DensityTerm(Constant(1.0), (2, 0, 0)),
            DensityTerm(monomial(1.0, 1), (0, 1, 0)),
        ))
        assert_allclose(euler_lagrange(density, self.u, 1.0).values, 0.0, atol=1e-10)

    def test_functional_value_of_mass(self):
        density = HamiltonianDensity((DensityTerm(monomial(1.0, 1)),))
        self.assertAlmostEqual(functional_value(density, self.u, 1.0), np.pi, places=12)


class PoissonBracketTests(SimpleTestCase):
    grid = PeriodicGrid(np.pi, 64)

    def setUp(self):
        self.u = self.grid.sample(lambda x: 0.5 + 0.3 * np.sin(x))
        self.rng = np.random.default_rng(21)

    def test_diagonal_vanishes(self):
        density = quadratic_density(self.rng, 'H')
        self.assertAlmostEqual(poisson_bracket(density, density, self.u, 0.4), 0.0, places=11)

    def test_antisymmetry(self):
        for _ in range(3):
            h, f = quadratic_density(self.rng, 'H'), quadratic_density(self.rng, 'F')
            hf = poisson_bracket(h, f, self.u, 0.4)
            fh = poisson_bracket(f, h, self.u, 0.4)
            self.assertAlmostEqual(hf, -fh, delta=1e-10 * max(1.0, abs(hf)))

    def test_bilinearity(self):
        h, f, g = (quadratic_density(self.rng, tag) for tag in 'HFG')
        combined = HamiltonianDensity(f.terms + g.terms)
        total = poisson_bracket(h, combined, self.u, 0.4)
        parts = poisson_bracket(h, f, self.u, 0.4) + poisson_bracket(h, g, self.u, 0.4)
        self.assertAlmostEqual(total, parts, delta=1e-10 * max(1.0, abs(total)))

    def test_mass_is_a_casimir(self):
        mass = HamiltonianDensity((DensityTerm(monomial(1.0, 1)),))
        other = quadratic_density(self.rng, 'F')
        self.assertAlmostEqual(poisson_bracket(mass, other, self.u, 0.4), 0.0, places=11)


class CommutingDensityTests(SimpleTestCase):
    def test_cubic_f_reduces_to_the_hamiltonian(self):
        c, p = polynomial(0.3, 0.2, 0.1), polynomial(-0.1, 0.5)
        density = hf_density(CUBIC, c, p)
        rng = np.random.default_rng(5)
        u, ux, uxx = rng.uniform(0.1, 1.0, (3, 20))
        eps = 0.37
        expected = u ** 3 / 6 - eps ** 2 / 2 * c(u) * ux ** 2 + eps ** 4 * p(u) * uxx ** 2
        assert_allclose(density.h(u, ux, uxx, eps=eps), expected, rtol=1e-13)

    def test_linear_f_is_mass(self):
        density = hf_density(monomial(1.0, 1), Constant(1 / 6), Constant(1 / 12))
        self.assertEqual(len(density.terms), 1)
        u = default_test_field()
        other = hf_density(CUBIC, Constant(1 / 6), Constant(1 / 12))
        self.assertAlmostEqual(poisson_bracket(density, other, u, 0.1), 0.0, places=11)

    def test_quadratic_f_has_no_corrections(self):
        density = hf_density(monomial(0.5, 2), polynomial(1.0, 1.0), polynomial(0.0, 1.0))
        self.assertEqual(density.eps_powers, [0])


class CoefficientRelationTests(SimpleTestCase):
    def test_kdv_passes(self):
        self.assertTrue(check_coefficients({1: 1.0}, U_SAMPLES).passed)

    def test_counterexample_reports_one_half(self):
        report = check_coefficients({1: monomial(1.0, 1)}, U_SAMPLES)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.violations['b2'], 0.5)

    def test_catalog_models_are_hamiltonian(self):
        models = [
            build_model('genkdv', n=1), build_model('genkdv', n=3), build_model('sinh-kdv'),
            build_model('kawahara', alpha=1.0, beta=1.0), build_model('kawahara', alpha=0.0, beta=-1.0),
            build_model('kdv2', alpha=0.5),
            build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=[0.0, 0.0, 1.0]),
        ]
        for model in models:
            with self.subTest(model=model.name):
                self.assertTrue(check_model(model, U_SAMPLES).passed)

    def test_quartic_p_breaks_only_the_printed_b10(self):
        model = build_model('nonlinear-dispersion', c=1.0, p=[0.0, 0.0, 0.0, 0.0, 1.0])
        report = check_model(model, U_SAMPLES)
        self.assertTrue(report.passed)
        self.assertGreater(report.violations['b10_printed'], 1.0)


class Order6ExtensionTests(SimpleTestCase):
    def test_constant_c_without_p(self):
        ext = order6_extension(1.0, 0.0)
        assert_allclose(ext.alpha(U_SAMPLES), 0.0, atol=1e-15)

    def test_unit_c_and_p(self):
        ext = order6_extension(1.0, 1.0)
        assert_allclose(ext.alpha(U_SAMPLES), 20 / 7, rtol=1e-14)

    def test_vanishing_c_is_obstructed(self):
        with self.assertRaises(ObstructionError):
            order6_extension(0.0, 1.0)
        with self.assertRaises(ObstructionError):
            order6_extension(polynomial(-0.5, 1.0), 1.0)

    def test_alpha_matches_direct_evaluation(self):
        u = U_SAMPLES
        c, c1, c2 = 1 + u ** 2, 2 * u, 2.0
        p, p1 = u ** 3 - u, 3 * u ** 2 - 1
        expected = (80 * p ** 2 / c - 67 * p * c1 + 33 * c * p1 + 12 * c * c1 ** 2 - 9 * c ** 2 * c2) / 28
        alpha = extension_alpha(polynomial(1.0, 0.0, 1.0), polynomial(0.0, -1.0, 0.0, 1.0))
        assert_allclose(alpha(u), expected, rtol=1e-10)

    def test_cubic_f_reproduces_the_extension_hamiltonian(self):
        ext = order6_extension(polynomial(1.0, 0.5), polynomial(0.2, 0.1), beta=0.3)
        alpha_f, beta_f, gamma_f, delta_f = commuting_coefficients(ext, CUBIC)
        assert_allclose(alpha_f(U_SAMPLES), ext.alpha(U_SAMPLES), rtol=1e-12)
        assert_allclose(beta_f(U_SAMPLES), 0.3, rtol=1e-12)
        assert_allclose(gamma_f(U_SAMPLES), 0.0, atol=1e-12)
        assert_allclose(delta_f(U_SAMPLES), 0.0, atol=1e-12)


class BracketScalingTests(SimpleTestCase):
    c, p = Constant(1 / 6), Constant(1 / 12)

    def test_random_pairs_commute_to_sixth_order(self):
        rng = np.random.default_rng(2024)
        for _ in range(3):
            f, g = random_polynomial(rng), random_polynomial(rng)
            result = bracket_scaling(f, g, self.c, self.p)
            self.assertGreaterEqual(result.slope, 5.7)
            self.assertEqual(result.leading_order, 6)
            self.assertGreater(result.fit.r, 0.999)

    def test_translation_commutes_exactly(self):
        result = bracket_scaling(monomial(1 / 24, 4), monomial(0.5, 2), self.c, self.p)
        self.assertTrue(result.vanishes)

    def test_kdv_pair_commutes_exactly(self):
        result = bracket_scaling(CUBIC, monomial(1 / 24, 4), Constant(1 / 6), Constant(0.0))
        self.assertTrue(result.vanishes)

    def test_extension_commutes_to_eighth_order(self):
        rng = np.random.default_rng(99)
        ext = order6_extension(self.c, self.p, beta=0.2)
        for _ in range(3):
            f, g = random_polynomial(rng), random_polynomial(rng)
            result = bracket_scaling(f, g, self.c, self.p, extension=ext)
            self.assertGreaterEqual(result.slope, 7.7)

    def test_extension_hamiltonian_against_commuting_density(self):
        ext = order6_extension(Constant(0.5), Constant(0.1), beta=-0.3)
        f = polynomial(0.0, 0.3, -0.2, 0.4, 0.1, -0.05)
        result = scaling_of(extension_hamiltonian(ext), extension_commuting_density(ext, f),
                            default_test_field())
        self.assertGreaterEqual(result.slope, 7.7)

    def test_minimum_over_random_fields(self):
        rng = np.random.default_rng(8)
        fields = random_test_fields(bracket_grid(), 3, rng)
        slope = minimum_slope(random_polynomial(rng, 4), random_polynomial(rng, 5),
                              self.c, self.p, fields)
        self.assertGreaterEqual(slope, 5.7)

    def test_obstruction_demo_reports_every_beta(self):
        report = obstruction_demo(monomial(1 / 24, 4), monomial(1 / 120, 5), Constant(1.0),
                                  betas=(0.0, 1.0))
        self.assertEqual(set(report), {0.0, 1.0})
