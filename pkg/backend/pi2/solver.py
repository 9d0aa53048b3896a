"""Two-point boundary-value solve for the smooth PI2 solution.

The fourth-order equation is written as a first-order system for
(U, U_X, U_XX, U_XXX) and handed to ``scipy.integrate.solve_bvp`` (fourth
order collocation with damped Newton and mesh refinement). Value and slope of
the far-field expansion are imposed at both ends.
"""
import logging

import numpy as np
from scipy.integrate import solve_bvp

from breakup.exceptions import PI2AccuracyError, PI2DivergenceError
from .equation import asymptotic, asymptotic_slope, cubic_leading, pi2_residual
from .models import PI2Solution

logger = logging.getLogger(__name__)

X_MAX = 400.0
NODES = 4096
TOL = 1e-7
RESIDUAL_LIMIT = 1e-8
MAX_NODES = 300000
MESH_STRETCH = 6.0
CONTINUATION_START = 0.25
CONTINUATION_STEP = 0.1
MIN_STEP = 0.0125

SINGULAR_JACOBIAN = 2


def mapped_mesh(x_max, nodes, stretch=MESH_STRETCH):
    """Nodes on [-x_max, x_max] clustered at X = 0 by a sinh map."""
    s = np.linspace(-1.0, 1.0, int(nodes))
    return x_max * np.sinh(stretch * s) / np.sinh(stretch)


def initial_guess(X, T):
    U = cubic_leading(X, T)
    U_X = np.gradient(U, X, edge_order=2)
    U_XX = np.gradient(U_X, X, edge_order=2)
    U_XXX = np.gradient(U_XX, X, edge_order=2)
    return np.vstack([U, U_X, U_XX, U_XXX])


def _system(T, x_max):
    def fun(X, y):
        U, U_X, U_XX, U_XXX = y
        return np.vstack([U_X, U_XX, U_XXX,
                          240 * (T * U - X - U ** 3 / 6 - U_X ** 2 / 24 - U * U_XX / 12)])

    def fun_jac(X, y):
        U, U_X, U_XX, _ = y
        jac = np.zeros((4, 4, X.size))
        jac[0, 1] = jac[1, 2] = jac[2, 3] = 1.0
        jac[3, 0] = 240 * (T - U ** 2 / 2 - U_XX / 12)
        jac[3, 1] = -20 * U_X
        jac[3, 2] = -20 * U
        return jac

    ends = np.array([-x_max, x_max])
    value, slope = asymptotic(ends, T), asymptotic_slope(ends, T)

    def bc(ya, yb):
        return np.array([ya[0] - value[0], ya[1] - slope[0], yb[0] - value[1], yb[1] - slope[1]])

    def bc_jac(ya, yb):
        left, right = np.zeros((4, 4)), np.zeros((4, 4))
        left[0, 0] = left[1, 1] = 1.0
        right[2, 0] = right[3, 1] = 1.0
        return left, right

    return fun, bc, fun_jac, bc_jac


def collocation_residual(result, T):
    """Sup of the PI2 residual at interior nodes and interval midpoints."""
    X = result.x
    points = np.concatenate([X[1:-1], 0.5 * (X[1:] + X[:-1])])
    y = result.sol(points)
    U_XXXX = result.sol(points, 1)[3]
    return float(np.max(np.abs(pi2_residual(y[0], y[1], y[2], U_XXXX, points, T))))


def _solve_at(T, X, guess, x_max, tol, trace):
    fun, bc, fun_jac, bc_jac = _system(T, x_max)
    result = solve_bvp(fun, bc, X, guess, fun_jac=fun_jac, bc_jac=bc_jac, tol=tol,
                       max_nodes=MAX_NODES)
    rms = float(np.max(result.rms_residuals)) if result.rms_residuals.size else float('nan')
    trace.append({'T': T, 'status': int(result.status), 'message': result.message,
                  'iterations': int(result.niter), 'nodes': int(result.x.size), 'rms': rms})
    logger.debug('solve_bvp at T=%g: status %d, %d nodes, rms residual %.2e',
                 T, result.status, result.x.size, rms)
    if result.status == SINGULAR_JACOBIAN or not np.all(np.isfinite(result.y)):
        raise PI2DivergenceError(f'Newton iteration diverged at T={T:g}: {result.message}',
                                 T=T, trace=trace)
    if not result.success:
        raise PI2AccuracyError(f'PI2 solve at T={T:g} stopped above tolerance: {result.message}',
                               T=T, achieved=rms, trace=trace)
    return result


def _next_time(current, target, step):
    if abs(target - current) <= step:
        return target
    return current + np.copysign(step, target - current)


def _continue(result, T_from, T_to, X, x_max, tol, trace):
    """Carry a converged solve from T_from to T_to on the base mesh X.

    Each step restarts on X from a secant prediction through the last two
    solutions; a failed step is retried at half the step down to MIN_STEP.
    """
    step = CONTINUATION_STEP
    previous, current = None, (T_from, result.sol(X))
    while current[0] != T_to:
        T_next = float(_next_time(current[0], T_to, step))
        guess = current[1]
        if previous is not None:
            weight = (T_next - current[0]) / (current[0] - previous[0])
            guess = current[1] + weight * (current[1] - previous[1])
        try:
            result = _solve_at(T_next, X, guess, x_max, tol, trace)
        except (PI2AccuracyError, PI2DivergenceError):
            step /= 2
            if step < MIN_STEP:
                raise
            logger.debug('PI2 continuation step to T=%g failed; step reduced to %g', T_next, step)
            continue
        previous, current = current, (T_next, result.sol(X))
        step = min(CONTINUATION_STEP, 2 * step)
    return result


def pi2_solve(T, x_max=X_MAX, nodes=NODES, tol=TOL, residual_limit=RESIDUAL_LIMIT,
              start=None) -> PI2Solution:
    """Smooth solution of the PI2 equation at time T on [-x_max, x_max].

    Without ``start`` the solve begins from the cubic root at T itself when
    |T| <= 0.25, and otherwise at T = 0 followed by continuation in steps of
    at most 0.1. A previous ``PI2Solution`` passed as ``start`` is continued
    from its own T instead.
    """
    T = float(T)
    if x_max < 100:
        raise ValueError('x_max must be at least 100 for the far-field conditions to hold')
    if start is not None and float(start.T) == T:
        return start
    trace = []
    X = mapped_mesh(x_max, nodes)
    if start is not None:
        anchor_T, guess = float(start.T), start.interpolant(X)
    elif abs(T) <= CONTINUATION_START:
        anchor_T, guess = T, initial_guess(X, T)
    else:
        anchor_T, guess = 0.0, initial_guess(X, 0.0)
    result = _solve_at(anchor_T, X, guess, x_max, tol, trace)
    result = _continue(result, anchor_T, T, X, x_max, tol, trace)

    residual = collocation_residual(result, T)
    if residual > residual_limit:
        raise PI2AccuracyError(f'PI2 residual {residual:.2e} above {residual_limit:.0e} at T={T:g}',
                               T=T, achieved=residual, trace=trace)

    probes = np.array([-0.5 * x_max, 0.5 * x_max])
    remainders = result.sol(probes)[0] - asymptotic(probes, T)
    solution = PI2Solution(
        T=T, X=result.x, derivatives=result.y, residual=residual,
        iterations=sum(entry['iterations'] for entry in trace), x_max=float(x_max),
        nodes=int(result.x.size), tail_remainders=(float(remainders[0]), float(remainders[1])),
        trace=trace, interpolant=result.sol,
    )
    if solution.asymmetric:
        logger.warning('PI2 at T=%g: far-field remainders differ in size (%.2e left, %.2e right)',
                       T, *solution.tail_remainders)
    logger.info('PI2 solved at T=%g: %d nodes, residual %.2e', T, solution.nodes, residual)
    return solution
