import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase, tag
from scipy.integrate import quad

from breakup.exceptions import BlowupSuspectedError, InvalidFieldError, NonConvergenceError
from equations.catalog import build_model
from spectral.models import PeriodicGrid, SpectralCoeffs
from .energy import energy, mass
from .etdrk4 import etdrk4_step, etdrk4_tables
from .evolve import ETDRK4, GAUSS_IRK4, evolve, integrator_for
from .gauss import gauss_irk4_step, solve_stages, stability_function
from .models import Monitors, RunStatus, StepperState


def sech2(x):
    return 1.0 / np.cosh(x) ** 2


def advance(step, model, u0, eps, dt, steps, **options):
    state = StepperState.start(u0)
    for _ in range(steps):
        state = step(state, dt, model, eps, **options)
    return state.field().values


def observed_order(coarse, medium, fine):
    return np.log2(np.max(np.abs(coarse - medium)) / np.max(np.abs(medium - fine)))


class Etdrk4Tests(SimpleTestCase):
    grid = PeriodicGrid(8 * np.pi, 512)

    def test_linear_problem_is_exact(self):
        model = build_model('genkdv', n=1)
        u0 = self.grid.sample(sech2)
        state = StepperState.start(u0)
        dt = 0.37
        result = etdrk4_step(state, dt, model, 0.1, nonlinear=np.zeros_like)
        expected = np.exp(model.linear_symbol_on(self.grid, 0.1) * dt) * state.u_hat.coeffs
        assert_allclose(result.u_hat.coeffs, expected, atol=1e-12 * np.max(np.abs(expected)))
        self.assertAlmostEqual(result.t, dt)

    def test_weights_at_zero_symbol(self):
        tables = etdrk4_tables(build_model('genkdv', n=1), self.grid, 0.01, 0.1)
        self.assertAlmostEqual(tables.E[0], 1.0)
        assert_allclose(tables.Q[0], 0.005, rtol=1e-13)
        for weight in (tables.f1[0], tables.f2[0], tables.f3[0]):
            assert_allclose(weight, 0.01 / 6, rtol=1e-13)

    def test_tables_are_cached_per_step_size(self):
        model = build_model('genkdv', n=1)
        state = StepperState.start(self.grid.sample(sech2))
        state = etdrk4_step(state, 1e-3, model, 0.1)
        state = etdrk4_step(state, 1e-3, model, 0.1)
        self.assertEqual(len(state.cache), 1)
        state = etdrk4_step(state, 5e-4, model, 0.1)
        self.assertEqual(len(state.cache), 2)

    def test_kdv_self_convergence(self):
        model = build_model('genkdv', n=1)
        u0 = self.grid.sample(sech2)
        runs = [advance(etdrk4_step, model, u0, 0.1, 0.1 / steps, steps) for steps in (25, 50, 100)]
        self.assertAlmostEqual(observed_order(*runs), 4.0, delta=0.2)

    def test_soliton_keeps_its_shape(self):
        kappa, x0, t_end = 1.0, -6.0, 1.0
        model = build_model('genkdv', n=1)

        def soliton(t):
            return self.grid.sample(lambda x: 2 * kappa ** 2 * sech2(kappa * (x - 4 * kappa ** 2 * t - x0)))

        final = advance(etdrk4_step, model, soliton(0.0), 1.0, 1e-3, 1000)
        self.assertLess(np.max(np.abs(final - soliton(t_end).values)), 1e-6)

    def test_non_finite_stage_raises_with_last_state(self):
        coeffs = np.fft.fft(sech2(self.grid.nodes)).astype(complex)
        coeffs[3] = np.nan
        state = StepperState(0.25, SpectralCoeffs(self.grid, coeffs))
        with self.assertRaises(BlowupSuspectedError) as ctx:
            etdrk4_step(state, 1e-3, build_model('genkdv', n=1), 0.1)
        self.assertIs(ctx.exception.last_state, state)
        self.assertEqual(ctx.exception.t, 0.25)


class GaussTests(SimpleTestCase):
    def test_zero_rhs_leaves_state_unchanged(self):
        y = np.array([0.3, -1.0, 2.0])
        K, history = solve_stages(np.zeros_like, y, 0.1)
        assert_allclose(K, 0.0)
        self.assertEqual(history, [0.0])

        grid = PeriodicGrid(np.pi, 32)
        u0 = grid.field(np.full(32, 0.7))
        model = build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0)
        result = gauss_irk4_step(StepperState.start(u0), 0.01, model, 0.1)
        assert_allclose(result.field().values, 0.7, atol=1e-14)

    def test_real_linear_step_matches_pade(self):
        lam, dt = -3.0, 0.5
        y = np.array([1.0, 2.0, -1.0, 0.5])
        K, _ = solve_stages(lambda v: lam * v, y, dt)
        y_new = y + dt * 0.5 * (K[0] + K[1])
        assert_allclose(y_new, stability_function(lam * dt).real * y, atol=1e-10)

    def test_oscillatory_linear_step_matches_pade(self):
        omega, dt = 2.0, 0.3
        rotation = np.array([[0.0, -omega], [omega, 0.0]])
        y = np.array([1.0, 0.0])
        K, _ = solve_stages(lambda v: rotation @ v, y, dt)
        y_new = y + dt * 0.5 * (K[0] + K[1])
        expected = stability_function(1j * omega * dt)
        assert_allclose(y_new, [expected.real, expected.imag], atol=1e-10)

    def test_stability_function_is_pade_of_exp(self):
        z = np.array([1e-3, -2e-3 + 1e-3j])
        assert_allclose(stability_function(z), np.exp(z), rtol=1e-14)
        self.assertAlmostEqual(abs(stability_function(5j)), 1.0)

    def test_nonlinear_dispersion_self_convergence(self):
        grid = PeriodicGrid(np.pi, 16)
        u0 = grid.sample(lambda x: 1.0 + 0.5 * np.sin(x))
        model = build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0,
                            u_range=(0.4, 1.6))
        runs = [advance(gauss_irk4_step, model, u0, 0.1, 0.4 / steps, steps, newton_tol=1e-13)
                for steps in (20, 40, 80)]
        self.assertAlmostEqual(observed_order(*runs), 4.0, delta=0.3)

    def test_failed_stage_solve_reports_residuals(self):
        with self.assertRaises(NonConvergenceError) as ctx:
            solve_stages(lambda v: 1.0 + v ** 2, np.array([0.0, 0.5]), 1.0,
                         max_newton=2, max_fixed_point=1)
        self.assertTrue(ctx.exception.residual_history)

    def test_kawahara_steppers_agree(self):
        grid = PeriodicGrid(np.pi, 32)
        u0 = grid.sample(lambda x: 0.5 + 0.3 * np.sin(x))
        model = build_model('kawahara', alpha=1.0, beta=1.0)
        explicit = advance(etdrk4_step, model, u0, 0.1, 1e-3, 50)
        implicit = advance(gauss_irk4_step, model, u0, 0.1, 1e-3, 50)
        self.assertLess(np.max(np.abs(explicit - implicit)), 1e-7)


class EnergyTests(SimpleTestCase):
    grid = PeriodicGrid(8 * np.pi, 2 ** 10)

    def test_zero_field(self):
        u = self.grid.field(np.zeros(self.grid.size))
        self.assertEqual(energy(build_model('genkdv', n=1), u, 0.1), 0.0)

    def test_kdv_energy_against_quadrature(self):
        eps, L = 0.1, 8 * np.pi

        def integrand(x):
            ux = -2 * sech2(x) * np.tanh(x)
            return 0.5 * eps ** 2 * ux ** 2 - sech2(x) ** 3

        expected, _ = quad(integrand, -L, L, limit=200, epsabs=1e-14, epsrel=1e-13)
        value = energy(build_model('genkdv', n=1), self.grid.sample(sech2), eps)
        assert_allclose(value, expected, rtol=1e-10)

    def test_genkdv4_energy_is_negative(self):
        self.assertLess(energy(build_model('genkdv', n=4), self.grid.sample(sech2), 0.1), 0.0)

    def test_mass(self):
        assert_allclose(mass(self.grid.sample(sech2)), 2.0, rtol=1e-12)


class EvolveTests(SimpleTestCase):
    grid = PeriodicGrid(8 * np.pi, 512)

    def test_integrator_follows_model_kind(self):
        self.assertEqual(integrator_for(build_model('kawahara', alpha=1.0, beta=1.0)), ETDRK4)
        model = build_model('nonlinear-dispersion', c=[0.0, 0.0, 1.0], p=0.0)
        self.assertEqual(integrator_for(model), GAUSS_IRK4)

    def test_zero_time_returns_initial_data(self):
        u0 = self.grid.sample(sech2)
        record = evolve(build_model('genkdv', n=1), u0, 0.05, 0.0, 1e-3)
        assert_allclose(record.final.values, u0.values, atol=1e-15)
        self.assertEqual(record.steps, 0)
        self.assertEqual(record.status, RunStatus.COMPLETED)

    def test_snapshots_are_hit_exactly(self):
        record = evolve(build_model('genkdv', n=1), self.grid.sample(sech2), 0.1, 0.05, 0.01,
                        snapshot_times=(0.015,))
        self.assertEqual([t for t, _ in record.snapshots], [0.0, 0.015, 0.05])
        self.assertEqual(record.steps, 6)

    def test_energy_and_mass_are_conserved(self):
        record = evolve(build_model('genkdv', n=1), self.grid.sample(sech2), 0.1, 0.1, 1e-3,
                        monitors=Monitors(every=20))
        self.assertEqual(record.status, RunStatus.COMPLETED)
        self.assertLess(record.max_energy_drift, 1e-6)
        self.assertLess(record.max_mass_drift, 1e-10)
        self.assertEqual(record.flags, [])
        self.assertEqual(len(record.energy), 7)

    def test_two_thirds_filter_clears_high_modes(self):
        record = evolve(build_model('genkdv', n=1), self.grid.sample(sech2), 0.1, 0.05, 0.01,
                        dealias=True)
        coeffs = np.fft.fft(record.final.values)
        m = np.abs(np.fft.fftfreq(self.grid.size, 1.0 / self.grid.size))
        self.assertLess(np.max(np.abs(coeffs[m > self.grid.size / 3])), 1e-10)
        self.assertEqual(record.status, RunStatus.COMPLETED)

    def test_unresolved_initial_data_rejected(self):
        coarse = PeriodicGrid(8 * np.pi, 64)
        with self.assertRaises(InvalidFieldError):
            evolve(build_model('genkdv', n=1), coarse.sample(sech2), 0.1, 0.1, 1e-3)

    def test_resolution_exhausted_keeps_partial_record(self):
        grid = PeriodicGrid(8 * np.pi, 256)
        record = evolve(build_model('genkdv', n=1), grid.sample(sech2), 0.03, 0.6, 1e-3,
                        monitors=Monitors(every=1))
        self.assertEqual(record.status, RunStatus.RESOLUTION_EXHAUSTED)
        self.assertIn('resolution exhausted', record.message)
        self.assertLess(record.final_time, 0.6)
        self.assertTrue(record.final.valid)

    @tag('slow')
    def test_small_dispersion_energy_drift(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 14)
        record = evolve(build_model('genkdv', n=1), grid.sample(sech2), 1e-2, 0.4, 1e-4,
                        monitors=Monitors(every=200))
        self.assertEqual(record.status, RunStatus.COMPLETED)
        self.assertLess(record.max_energy_drift, 1e-6)

    @tag('slow')
    def test_genkdv4_sup_norm_grows_after_breakup(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 12)
        record = evolve(build_model('genkdv', n=4), grid.sample(sech2), 0.1, 0.318, 1e-4,
                        monitors=Monitors(every=50))
        self.assertIn(record.status, (RunStatus.COMPLETED, RunStatus.RESOLUTION_EXHAUSTED))
        sup = np.array([value for _, value in record.linf])
        self.assertGreater(sup.max(), 1.0 + 1e-3)
