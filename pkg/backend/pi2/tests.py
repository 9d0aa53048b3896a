import tempfile
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase, tag

from breakup.exceptions import PI2AccuracyError
from .equation import asymptotic, asymptotic_slope, cubic_leading, pi2_residual
from .solver import _next_time, initial_guess, mapped_mesh, pi2_solve
from .storage import read_table, write_table
from .tabulate import pi2_tabulate

QUICK = {'x_max': 100.0, 'nodes': 2048, 'tol': 1e-8}


def leading_jet(X):
    """U0 = -(6X)^(1/3) and its derivatives up to order four, for X > 0."""
    c = 6 ** (1 / 3)
    return (-c * X ** (1 / 3), -c / 3 * X ** (-2 / 3), 2 * c / 9 * X ** (-5 / 3),
            -10 * c / 27 * X ** (-8 / 3), 80 * c / 81 * X ** (-11 / 3))


class EquationTests(SimpleTestCase):
    def test_residual_of_zero_is_x(self):
        X = np.linspace(-5, 5, 11)
        zero = np.zeros_like(X)
        assert_array_equal(pi2_residual(zero, zero, zero, zero, X, 0.0), X)

    def test_leading_root_residual_decays(self):
        magnitudes = []
        for X in (1e3, 1e4):
            U, U_X, U_XX, _, U_XXXX = leading_jet(X)
            magnitudes.append(abs(pi2_residual(U, U_X, U_XX, U_XXXX, X, 0.0)))
        self.assertLess(magnitudes[0], 1e-3)
        self.assertGreater(magnitudes[0] / magnitudes[1], 10)

    def test_asymptotic_slope(self):
        h = 1e-5
        for T in (-1.0, 0.0, 0.7):
            for X in (-300.0, 150.0):
                central = (asymptotic(X + h, T) - asymptotic(X - h, T)) / (2 * h)
                self.assertAlmostEqual(float(asymptotic_slope(X, T)), float(central), delta=1e-9)


class CubicLeadingTests(SimpleTestCase):
    def test_closed_form_at_zero_time(self):
        self.assertAlmostEqual(cubic_leading(6.0, 0.0), -36 ** (1 / 3), places=13)
        X = np.array([1e2, 1e4, 1e6, -1e3])
        assert_allclose(cubic_leading(X, 0.0), -np.cbrt(6 * X), rtol=1e-14)

    def test_unique_root_solves_cubic(self):
        X = np.linspace(-20, 20, 81)
        for T in (-2.0, -0.3, 0.0):
            U = cubic_leading(X, T)
            assert_allclose(X - T * U + U ** 3 / 6, 0.0, atol=1e-12 * (1 + np.max(np.abs(X))))

    def test_three_root_window_is_bridged(self):
        T = 1.0
        self.assertAlmostEqual(cubic_leading(0.0, T), 0.0, places=14)
        X = np.linspace(-5, 5, 401)
        U = cubic_leading(X, T)
        self.assertTrue(np.all(np.diff(U) < 0))
        outside = np.abs(X) > 2 / 3 * np.sqrt(2)
        residual = X - T * U + U ** 3 / 6
        self.assertLess(np.max(np.abs(residual[outside])), 1e-11)


class MeshTests(SimpleTestCase):
    def test_mapped_mesh(self):
        X = mapped_mesh(400.0, 1024)
        self.assertEqual(X[0], -400.0)
        self.assertEqual(X[-1], 400.0)
        self.assertTrue(np.all(np.diff(X) > 0))
        assert_allclose(X, -X[::-1], atol=1e-12)
        self.assertLess(np.diff(X)[512], np.diff(X)[0] / 50)

    def test_initial_guess_shape(self):
        X = mapped_mesh(100.0, 256)
        guess = initial_guess(X, -0.5)
        self.assertEqual(guess.shape, (4, 256))
        assert_array_equal(guess[0], cubic_leading(X, -0.5))

    def test_next_time(self):
        self.assertEqual(_next_time(0.0, 1.0, 0.1), 0.1)
        self.assertEqual(_next_time(0.0, -1.0, 0.1), -0.1)
        self.assertEqual(_next_time(0.95, 1.0, 0.1), 1.0)
        self.assertEqual(_next_time(-0.93, -1.0, 0.1), -1.0)

    def test_domain_too_small(self):
        with self.assertRaises(ValueError):
            pi2_solve(0.0, x_max=50.0)


class SolveTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.solution = pi2_solve(0.0, **QUICK)

    def test_residual_invariant(self):
        self.assertLess(self.solution.residual, 1e-8)
        self.assertGreater(self.solution.iterations, 0)

    def test_value_at_origin_is_negative(self):
        value = self.solution(0.0)
        self.assertLess(value, 0.0)
        self.assertGreater(value, -3.0)

    def test_bounded_by_far_field(self):
        self.assertLessEqual(np.max(np.abs(self.solution.U)), np.cbrt(6 * 100.0) + 1)

    def test_boundary_conditions(self):
        ends = np.array([-100.0, 100.0])
        assert_allclose(self.solution(ends), asymptotic(ends, 0.0), atol=1e-8)
        assert_allclose(self.solution(ends, 1), asymptotic_slope(ends, 0.0), atol=1e-8)

    def test_monotone_in_far_field(self):
        X = self.solution.X
        far = np.abs(X) > 10
        self.assertTrue(np.all(np.diff(self.solution.U[far][X[far] > 0]) < 0))
        self.assertTrue(np.all(np.diff(self.solution.U[far][X[far] < 0]) < 0))

    def test_remainder_decays_like_inverse_square(self):
        X = np.geomspace(30, 80, 12)
        remainder = self.solution(X) + np.cbrt(6 * X)
        slope = np.polyfit(np.log(X), np.log(np.abs(remainder)), 1)[0]
        self.assertGreater(slope, -2.2)
        self.assertLess(slope, -1.8)
        self.assertFalse(self.solution.asymmetric)

    def test_evaluation_beyond_domain_uses_expansion(self):
        self.assertEqual(self.solution(250.0), float(asymptotic(250.0, 0.0)))

    def test_residual_limit_is_enforced(self):
        with self.assertRaises(PI2AccuracyError) as ctx:
            pi2_solve(0.0, residual_limit=1e-30, **QUICK)
        self.assertGreater(ctx.exception.details['achieved'], 0)


class ContinuationTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.solutions = {T: pi2_solve(T, **QUICK) for T in (-1.0, -0.5, 0.5, 1.0)}

    def test_residual_invariant_away_from_zero_time(self):
        for T, solution in self.solutions.items():
            with self.subTest(T=T):
                self.assertEqual(solution.T, T)
                self.assertLess(solution.residual, 1e-8)
                self.assertLess(solution.nodes, 300000)

    def test_boundary_conditions(self):
        ends = np.array([-100.0, 100.0])
        for T, solution in self.solutions.items():
            with self.subTest(T=T):
                assert_allclose(solution(ends), asymptotic(ends, T), atol=1e-8)
                assert_allclose(solution(ends, 1), asymptotic_slope(ends, T), atol=1e-8)

    def test_far_field_agrees_with_cubic_root(self):
        X = np.array([-90.0, -60.0, 60.0, 90.0])
        for T, solution in self.solutions.items():
            with self.subTest(T=T):
                assert_allclose(solution(X), cubic_leading(X, T), atol=0.05)

    def test_continuing_from_a_solution(self):
        continued = pi2_solve(1.0, start=self.solutions[0.5], **QUICK)
        X = np.linspace(-50, 50, 201)
        self.assertLess(np.max(np.abs(continued(X) - self.solutions[1.0](X))), 1e-7)

    def test_start_at_the_same_time_is_returned(self):
        solution = self.solutions[-0.5]
        self.assertIs(pi2_solve(-0.5, start=solution, **QUICK), solution)


class TableTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = pi2_tabulate([0.0], **QUICK)

    def test_single_time_reduces_to_one_solve(self):
        self.assertEqual(len(self.table.solutions), 1)
        X = np.linspace(-50, 50, 41)
        assert_allclose(self.table(X, 0.0), self.table.solutions[0.0](X), atol=1e-9)

    def test_splice_with_expansion(self):
        inner = self.table(100.0 - 1e-9, 0.0)
        outer = self.table(100.0 + 1e-9, 0.0)
        self.assertLess(abs(inner - outer), 1e-6)
        self.assertEqual(self.table(1e4, 0.0), float(asymptotic(1e4, 0.0)))

    def test_storage(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_table(self.table, Path(directory) / 'pi2.dat')
            restored = read_table(path)
        assert_array_equal(restored.X, self.table.X)
        assert_array_equal(restored.values, self.table.values)
        self.assertEqual(restored.T_values, self.table.T_values)
        self.assertEqual(restored.residuals, self.table.residuals)
        X = np.linspace(-120, 120, 37)
        assert_array_equal(restored(X, 0.0), self.table(X, 0.0))


@tag('slow')
class DefaultSolveTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.solution = pi2_solve(0.0)

    def test_mesh_independence(self):
        finer = pi2_solve(0.0, nodes=8192)
        X = mapped_mesh(400.0, 4096)
        self.assertLess(np.max(np.abs(finer(X) - self.solution(X))), 1e-7)

    def test_domain_independence(self):
        wider = pi2_solve(0.0, x_max=800.0)
        X = np.linspace(-200, 200, 2001)
        self.assertLess(np.max(np.abs(wider(X) - self.solution(X))), 1e-7)

    def test_continued_solves_pass_residual(self):
        for T in (-1.0, 1.0):
            with self.subTest(T=T):
                solution = pi2_solve(T)
                self.assertLess(solution.residual, 1e-8)
                self.assertLessEqual(np.max(np.abs(solution.U)), np.cbrt(6 * 400.0) + 1)


@tag('slow')
class HeldOutInterpolationTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = pi2_tabulate(np.round(np.linspace(-0.2, 0.2, 9), 2), **QUICK)

    def test_every_interval_is_checked(self):
        assert_allclose([T for T, _ in self.table.held_out], np.linspace(-0.175, 0.175, 8),
                        atol=1e-12)
        self.assertLessEqual(self.table.interpolation_error, 1e-6)

    def test_interpolation_against_direct_solve(self):
        T = 0.1125
        direct = pi2_solve(T, **QUICK)
        X = np.linspace(-20, 20, 401)
        self.assertLessEqual(np.max(np.abs(self.table(X, T) - direct(X))), 1e-6)

    def test_grid_values_are_reproduced(self):
        X = self.table.X[::64]
        for T in (-0.2, 0.0, 0.15):
            with self.subTest(T=T):
                assert_allclose(self.table(X, T), self.table.solutions[T](X), atol=1e-10)

    def test_held_out_errors_are_stored(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_table(self.table, Path(directory) / 'pi2.dat')
            restored = read_table(path)
        self.assertEqual(restored.held_out, self.table.held_out)

    def test_coarse_grid_is_rejected(self):
        with self.assertRaises(PI2AccuracyError) as ctx:
            pi2_tabulate([-0.2, 0.0, 0.2], interpolation_tol=1e-14, **QUICK)
        self.assertEqual(len(ctx.exception.details['held_out']), 2)


@tag('slow')
class DefaultTableTests(SimpleTestCase):
    def test_default_grid_meets_interpolation_tolerance(self):
        table = pi2_tabulate([round(-1 + 0.05 * j, 2) for j in range(41)])
        self.assertLessEqual(table.interpolation_error, 1e-6)
        self.assertLess(max(table.residuals), 1e-8)
