import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from breakup.exceptions import InvalidFieldError
from .models import PeriodicGrid, RealField, SpectralCoeffs
from .transforms import (
    dealias, derivative, resolution_ok, to_physical, to_spectral,
)

# Sixth-order central stencil for the third derivative, offsets -4..4
THIRD_DERIVATIVE_STENCIL = np.array(
    [-7 / 240, 3 / 10, -169 / 120, 61 / 30, 0.0, -61 / 30, 169 / 120, -3 / 10, 7 / 240])


def sech2(x):
    return 1.0 / np.cosh(x) ** 2


class PeriodicGridTests(SimpleTestCase):
    def test_nodes_are_uniform(self):
        grid = PeriodicGrid(8 * np.pi, 64)
        assert_allclose(np.diff(grid.nodes), grid.spacing, rtol=1e-13)
        self.assertAlmostEqual(grid.nodes[0], -8 * np.pi)

    def test_wavenumbers_symmetric_except_nyquist(self):
        grid = PeriodicGrid(np.pi, 16)
        k = grid.wavenumbers
        self.assertEqual(k[grid.nyquist_index], -8.0)
        positive = sorted(k[k > 0])
        negative = sorted(-k[(k < 0) & (k != -8.0)])
        assert_allclose(positive, negative)

    def test_rejects_small_or_odd_sizes(self):
        with self.assertRaises(InvalidFieldError):
            PeriodicGrid(1.0, 8)
        with self.assertRaises(InvalidFieldError):
            PeriodicGrid(1.0, 33)

    def test_field_length_checked(self):
        with self.assertRaises(InvalidFieldError):
            RealField(PeriodicGrid(1.0, 16), np.zeros(15))


class DerivativeTests(SimpleTestCase):
    def test_single_mode_first_derivative(self):
        L = 8 * np.pi
        grid = PeriodicGrid(L, 256)
        f = grid.sample(lambda x: np.sin(np.pi * x / L))
        df = derivative(f, 1)
        assert_allclose(df.values, (np.pi / L) * np.cos(np.pi * grid.nodes / L), atol=1e-12)

    def test_constant_has_zero_derivatives(self):
        grid = PeriodicGrid(3.0, 32)
        f = grid.field(np.ones(32))
        for m in range(1, 7):
            assert_allclose(derivative(f, m).values, 0.0, atol=1e-12)

    def test_sech2_third_derivative_against_finite_differences(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 12)
        f = grid.sample(sech2)
        h = grid.spacing
        fd = sum(w * np.roll(f.values, -offset)
                 for w, offset in zip(THIRD_DERIVATIVE_STENCIL, range(-4, 5))) / h ** 3
        spectral = derivative(f, 3).values
        self.assertLess(np.max(np.abs(spectral - fd)), 1e-6)

    def test_repeated_first_derivative_matches_second(self):
        grid = PeriodicGrid(np.pi, 64)
        f = grid.sample(lambda x: np.exp(np.sin(x)) + 0.2 * np.cos(3 * x))
        assert_allclose(derivative(derivative(f, 1), 1).values, derivative(f, 2).values,
                        atol=1e-10)

    def test_nonfinite_input_rejected(self):
        grid = PeriodicGrid(1.0, 16)
        values = np.zeros(16)
        values[3] = np.nan
        with self.assertRaises(InvalidFieldError):
            derivative(grid.field(values), 1)

    def test_order_above_six_rejected(self):
        grid = PeriodicGrid(1.0, 16)
        with self.assertRaises(InvalidFieldError):
            derivative(grid.field(np.zeros(16)), 7)


class TransformTests(SimpleTestCase):
    def setUp(self):
        self.grid = PeriodicGrid(8 * np.pi, 512)
        rng = np.random.default_rng(7)
        self.field = self.grid.field(sech2(self.grid.nodes) + 0.1 * rng.standard_normal(512))

    def test_round_trip(self):
        back = to_physical(to_spectral(self.field))
        error = np.max(np.abs(back.values - self.field.values)) / self.field.sup_norm()
        self.assertLess(error, 1e-13)

    def test_parseval(self):
        grid_sum = np.sum(self.field.values ** 2) * self.grid.spacing
        spectral_sum = to_spectral(self.field).parseval_sum()
        self.assertLess(abs(grid_sum - spectral_sum) / grid_sum, 1e-12)

    def test_real_field_gives_hermitian_coefficients(self):
        self.assertTrue(to_spectral(self.field).is_hermitian())

    def test_dealias_keeps_low_modes(self):
        grid = PeriodicGrid(np.pi, 48)
        f = grid.sample(lambda x: np.cos(2 * x) + np.cos(20 * x))
        filtered = to_physical(dealias(to_spectral(f)))
        assert_allclose(filtered.values, np.cos(2 * grid.nodes), atol=1e-12)


class ResolutionTests(SimpleTestCase):
    def test_sech2_is_resolved(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 10)
        report = resolution_ok(to_spectral(grid.sample(sech2)))
        self.assertTrue(report.ok)

    def test_flat_spectrum_is_not_resolved(self):
        grid = PeriodicGrid(1.0, 32)
        report = resolution_ok(SpectralCoeffs(grid, np.ones(32)))
        self.assertFalse(report.ok)
        self.assertEqual(report.tail_max, 1.0)

    def test_zero_field_is_resolved(self):
        grid = PeriodicGrid(1.0, 32)
        report = resolution_ok(SpectralCoeffs(grid, np.zeros(32)))
        self.assertTrue(report.ok)
        self.assertEqual(report.tail_max, 0.0)
