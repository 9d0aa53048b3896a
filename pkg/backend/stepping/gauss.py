"""Two-stage Gauss-Legendre implicit Runge-Kutta (order 4) in physical space.

Stage slopes are found by fixed-point iteration; when that stalls the stage
system is handed to an inexact Newton solver (scipy's newton_krylov) whose
inner Krylov solves are preconditioned by the frozen-coefficient symbol of the
model, inverted mode by mode.
"""
import logging

import numpy as np
from scipy import fft
from scipy.optimize import NoConvergence, newton_krylov
from scipy.sparse.linalg import LinearOperator

from breakup.exceptions import BlowupSuspectedError, NonConvergenceError
from equations.rhs import rhs_hat
from .models import StepperState

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)
GAUSS_A = np.array([[0.25, 0.25 - SQRT3 / 6],
                    [0.25 + SQRT3 / 6, 0.25]])
GAUSS_B = np.array([0.5, 0.5])
GAUSS_C = np.array([0.5 - SQRT3 / 6, 0.5 + SQRT3 / 6])

NEWTON_TOL = 1e-12
MAX_NEWTON = 50
MAX_FIXED_POINT = 50


def stability_function(z):
    """R(z) of the two-stage Gauss method, the (2,2) Pade approximant of exp."""
    z = np.asarray(z, dtype=complex)
    return (1 + z / 2 + z ** 2 / 12) / (1 - z / 2 + z ** 2 / 12)


def _stage_points(y, dt, K):
    return y + dt * (GAUSS_A[0, 0] * K[0] + GAUSS_A[0, 1] * K[1]), \
        y + dt * (GAUSS_A[1, 0] * K[0] + GAUSS_A[1, 1] * K[1])


def stage_preconditioner(symbol, dt):
    """Inverse of I - dt A (x) diag(symbol), applied through the FFT.

    ``symbol`` is the Fourier symbol of a constant-coefficient approximation
    of the right-hand side; the result acts on stacked real stage vectors.
    """
    lam = dt * np.asarray(symbol, dtype=complex)
    m11, m12 = 1 - GAUSS_A[0, 0] * lam, -GAUSS_A[0, 1] * lam
    m21, m22 = -GAUSS_A[1, 0] * lam, 1 - GAUSS_A[1, 1] * lam
    det = m11 * m22 - m12 * m21
    n = lam.size

    def apply(r):
        r = np.asarray(r, dtype=float).reshape(2, n)
        r1, r2 = fft.fft(r[0]), fft.fft(r[1])
        s1 = (m22 * r1 - m12 * r2) / det
        s2 = (-m21 * r1 + m11 * r2) / det
        return np.concatenate([fft.ifft(s1).real, fft.ifft(s2).real])

    return LinearOperator((2 * n, 2 * n), matvec=apply, dtype=float)


def solve_stages(f, y, dt, tol=NEWTON_TOL, max_newton=MAX_NEWTON, preconditioner=None,
                 max_fixed_point=MAX_FIXED_POINT):
    """Stage slopes K_i = f(y + dt sum_j a_ij K_j) for the Gauss tableau.

    ``f`` maps a real vector to a real vector. Returns (K, residual history);
    raises NonConvergenceError when neither solver meets ``tol`` (max-norm,
    scaled by max(1, |f(y)|)).
    """
    y = np.asarray(y, dtype=float)
    f0 = f(y)
    scale = max(1.0, float(np.max(np.abs(f0))))
    target = tol * scale
    K = np.stack([f0, f0])
    history = []

    for _ in range(max_fixed_point):
        Y1, Y2 = _stage_points(y, dt, K)
        update = np.stack([f(Y1), f(Y2)])
        residual = float(np.max(np.abs(update - K)))
        history.append(residual)
        if not np.isfinite(residual):
            break
        K = update
        if residual <= target:
            return K, history
        if len(history) > 1 and residual > 0.9 * history[-2]:
            break

    logger.debug('Fixed point stalled after %d sweeps (residual %.2e), switching to Newton',
                 len(history), history[-1] if history else float('nan'))
    n = y.size

    def stage_residual(flat):
        stages = flat.reshape(2, n)
        Y1, Y2 = _stage_points(y, dt, stages)
        return (stages - np.stack([f(Y1), f(Y2)])).ravel()

    start = (K if np.all(np.isfinite(K)) else np.stack([f0, f0])).ravel()
    try:
        solution = newton_krylov(
            stage_residual, start, method='lgmres', inner_M=preconditioner,
            f_tol=target, maxiter=max_newton,
            callback=lambda x, r: history.append(float(np.max(np.abs(r)))),
        )
    except (NoConvergence, ValueError, FloatingPointError) as exc:
        raise NonConvergenceError('Gauss stage equations did not converge', history,
                                  dt=dt, tolerance=target) from exc
    return solution.reshape(2, n), history


def gauss_irk4_step(state: StepperState, dt, model, eps, newton_tol=NEWTON_TOL,
                    max_newton=MAX_NEWTON) -> StepperState:
    grid = state.grid

    def f(values):
        return fft.ifft(rhs_hat(model, grid, fft.fft(values), eps)).real

    y = fft.ifft(state.u_hat.coeffs).real
    ubar = 0.5 * (float(np.min(y)) + float(np.max(y)))
    preconditioner = stage_preconditioner(model.frozen_symbol_on(grid, eps, ubar), dt)
    K, _ = solve_stages(f, y, dt, newton_tol, max_newton, preconditioner)
    y_new = y + dt * (GAUSS_B[0] * K[0] + GAUSS_B[1] * K[1])
    if not np.all(np.isfinite(y_new)):
        raise BlowupSuspectedError('Non-finite Gauss stage values', t=state.t,
                                   last_state=state, dt=dt)
    return state.advanced(dt, fft.fft(y_new))
