from collections import namedtuple

import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from breakup.exceptions import EmptyWindowError, FitError
from spectral.models import PeriodicGrid, SpectralCoeffs
from spectral.transforms import to_spectral
from .fits import fourier_decay_fit, loglog_fit
from .norms import linf_history, monotone_growth, windowed_sup_diff

Record = namedtuple('Record', 'snapshots')

EPS = np.array([10 ** (-1 - 0.25 * j) for j in range(7)])


def planted_spectrum(grid, mu, delta, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    k = np.abs(grid.wavenumbers)
    with np.errstate(divide='ignore'):
        modulus = np.where(k > 0, k ** (-(mu + 1)) * np.exp(-delta * k), 0.0)
    modulus *= np.exp(noise * rng.standard_normal(grid.size))
    coeffs = modulus.astype(complex)
    half = grid.size // 2
    coeffs[half + 1:] = np.conj(coeffs[1:half][::-1])
    coeffs[half] = 0.0
    return SpectralCoeffs(grid, coeffs)


class LogLogFitTests(SimpleTestCase):
    def test_exact_square_law(self):
        fit = loglog_fit(EPS, 3.0 * EPS ** 2)
        self.assertAlmostEqual(fit.slope, 2.0, places=10)
        self.assertAlmostEqual(fit.r, 1.0, places=10)
        self.assertLess(fit.sigma, 1e-8)
        self.assertEqual(fit.count, 7)

    def test_two_sevenths_law(self):
        fit = loglog_fit(EPS, EPS ** (2 / 7))
        self.assertAlmostEqual(fit.slope, 2 / 7, places=10)

    def test_nonpositive_value_identified(self):
        errors = EPS.copy()
        errors[3] = 0.0
        with self.assertRaises(FitError) as ctx:
            loglog_fit(EPS, errors)
        self.assertEqual(ctx.exception.details['index'], 3)

    def test_needs_three_points(self):
        with self.assertRaises(FitError):
            loglog_fit(EPS[:2], EPS[:2])

    def test_noisy_data_has_positive_sigma(self):
        rng = np.random.default_rng(4)
        fit = loglog_fit(EPS, EPS * np.exp(0.05 * rng.standard_normal(EPS.size)))
        self.assertGreater(fit.sigma, 0.0)
        self.assertLessEqual(abs(fit.r), 1.0)


class FourierDecayFitTests(SimpleTestCase):
    grid = PeriodicGrid(8 * np.pi, 1024)

    def test_recovers_planted_parameters(self):
        fit = fourier_decay_fit(planted_spectrum(self.grid, 1.0, 0.5))
        self.assertAlmostEqual(fit.mu, 1.0, delta=0.02)
        self.assertAlmostEqual(fit.delta, 0.5, delta=0.01)
        self.assertFalse(fit.multiple_singularities)

    def test_recovers_planted_parameters_under_noise(self):
        fit = fourier_decay_fit(planted_spectrum(self.grid, 1.0, 0.5, noise=0.01, seed=11))
        self.assertAlmostEqual(fit.mu, 1.0, delta=0.02)
        self.assertAlmostEqual(fit.delta, 0.5, delta=0.01)

    def test_sech2_strip_width(self):
        u = self.grid.sample(lambda x: 1.0 / np.cosh(x) ** 2)
        fit = fourier_decay_fit(to_spectral(u), k_range=(2.0, 15.0))
        self.assertAlmostEqual(fit.delta, np.pi / 2, delta=0.05 * np.pi / 2)

    def test_two_competing_singularities_flagged(self):
        first = planted_spectrum(self.grid, 1.0, 0.5).coeffs
        k = np.abs(self.grid.wavenumbers)
        beat = 1.0 + 0.9 * np.cos(3.0 * k)
        fit = fourier_decay_fit(SpectralCoeffs(self.grid, first * beat))
        self.assertTrue(fit.multiple_singularities)

    def test_zero_spectrum_rejected(self):
        with self.assertRaises(FitError):
            fourier_decay_fit(SpectralCoeffs(self.grid, np.zeros(self.grid.size)))


class WindowedNormTests(SimpleTestCase):
    grid = PeriodicGrid(8 * np.pi, 512)

    def test_identical_fields(self):
        f = self.grid.sample(np.sin)
        self.assertEqual(windowed_sup_diff(f, f, (0.8, 2.0)), 0.0)

    def test_bump_maximum(self):
        f = self.grid.sample(lambda x: np.exp(-x ** 2))
        g = self.grid.sample(lambda x: np.exp(-x ** 2) + 0.25 * np.exp(-(x - 1.4) ** 2 / 0.01))
        node = self.grid.nodes[np.argmin(np.abs(self.grid.nodes - 1.4))]
        expected = 0.25 * np.exp(-(node - 1.4) ** 2 / 0.01)
        self.assertAlmostEqual(windowed_sup_diff(f, g, (0.8, 2.0)), expected, places=12)

    def test_empty_window(self):
        f = self.grid.sample(np.sin)
        with self.assertRaises(EmptyWindowError):
            windowed_sup_diff(f, f, (0.001, 0.002))


class LinfHistoryTests(SimpleTestCase):
    grid = PeriodicGrid(np.pi, 16)

    def test_constant_solution_is_flat(self):
        u = self.grid.field(np.full(16, 0.7))
        history = linf_history(Record([(0.1 * j, u) for j in range(8)]))
        assert_allclose(history.values, 0.7)
        self.assertFalse(history.growing)

    def test_growth_detected(self):
        snapshots = [(0.1 * j, self.grid.field(np.full(16, 1.0 + j))) for j in range(8)]
        self.assertTrue(linf_history(Record(snapshots)).growing)

    def test_short_history_never_growing(self):
        self.assertFalse(monotone_growth([1.0, 2.0, 3.0]))
