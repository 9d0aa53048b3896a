import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from breakup.exceptions import PI2AccuracyError
from .models import PI2Table
from .solver import NODES, TOL, X_MAX, mapped_mesh, pi2_solve

logger = logging.getLogger(__name__)

INTERPOLATION_TOL = 1e-6


def assemble_spline(X, T_values, values):
    if len(T_values) == 1:
        return CubicSpline(X, values[:, 0])
    return RectBivariateSpline(X, T_values, values, kx=3, ky=min(3, len(T_values) - 1), s=0)


def solve_chain(T_values, x_max=X_MAX, nodes=NODES, tol=TOL):
    """Solve at each T in order, every solve continued from the one before."""
    solutions, previous = [], None
    for T in T_values:
        previous = pi2_solve(T, x_max=x_max, nodes=nodes, tol=tol, start=previous)
        solutions.append(previous)
    return solutions


def _held_out(T, start, x_max, nodes, tol):
    return pi2_solve(T, x_max=x_max, nodes=nodes, tol=tol, start=start)


def _map(pool, function, jobs):
    if pool is None:
        return [function(*job) for job in jobs]
    return [future.result() for future in [pool.submit(function, *job) for job in jobs]]


def pi2_tabulate(T_values, x_max=X_MAX, nodes=NODES, tol=TOL, workers=1,
                 interpolation_tol=INTERPOLATION_TOL) -> PI2Table:
    """Solve at every T and interpolate U bicubically on the mapped X grid.

    Times are solved in two chains moving away from T = 0. Every interval
    midpoint is then solved directly, continued from the grid solution
    nearer T = 0, and compared with the spline on the mapped grid; a sup
    difference above ``interpolation_tol`` raises ``PI2AccuracyError``.
    """
    T_values = tuple(sorted({float(T) for T in T_values}))
    if not T_values:
        raise ValueError('At least one T value is required')
    chains = [[T for T in T_values if T >= 0], [T for T in reversed(T_values) if T < 0]]
    chains = [(chain, x_max, nodes, tol) for chain in chains if chain]

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        solved = {solution.T: solution for chain in _map(pool, solve_chain, chains)
                  for solution in chain}
        solutions = [solved[T] for T in T_values]
        X = mapped_mesh(x_max, nodes)
        values = np.column_stack([solution(X) for solution in solutions])
        spline = assemble_spline(X, T_values, values)

        midpoints = [0.5 * (lo + hi) for lo, hi in zip(T_values, T_values[1:])]
        jobs = [(T, solved[lo] if abs(lo) <= abs(hi) else solved[hi], x_max, nodes, tol)
                for T, lo, hi in zip(midpoints, T_values, T_values[1:])]
        direct = _map(pool, _held_out, jobs)
    finally:
        if pool is not None:
            pool.shutdown()

    held_out = tuple((T, float(np.max(np.abs(spline(X, np.full_like(X, T), grid=False) - solution(X)))))
                     for T, solution in zip(midpoints, direct))
    logger.info('PI2 table over T in [%g, %g] with %d solves', T_values[0], T_values[-1],
                len(T_values))
    table = PI2Table(
        T_values=T_values, X=X, values=values,
        residuals=tuple(solution.residual for solution in solutions),
        x_max=float(x_max), nodes=int(nodes), spline=spline,
        solutions=dict(zip(T_values, solutions)), held_out=held_out,
    )
    if table.interpolation_error > interpolation_tol:
        T, error = max(held_out, key=lambda entry: entry[1])
        raise PI2AccuracyError(
            f'PI2 table interpolation error {error:.2e} at held-out T={T:g} above '
            f'{interpolation_tol:.0e}', T=T, achieved=error, held_out=held_out)
    return table
