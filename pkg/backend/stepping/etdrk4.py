"""Fourth-order exponential time differencing for u_hat' = L u_hat + N(u_hat).

The weights are evaluated by averaging over a circle of radius 1 around each
L dt in the complex plane, which removes the cancellation in the phi-functions
for small |L dt|. The stiff symbols here are imaginary, so the full circle is
used and the complex mean is kept.
"""
import logging

import numpy as np

from breakup.exceptions import BlowupSuspectedError
from equations.rhs import nonlinear_hat
from .models import ETDTables, StepperState

logger = logging.getLogger(__name__)

CONTOUR_POINTS = 64


def etdrk4_tables(model, grid, dt, eps, contour_points=CONTOUR_POINTS) -> ETDTables:
    L = model.linear_symbol_on(grid, eps)
    h = float(dt)
    E = np.exp(h * L)
    E2 = np.exp(h * L / 2)

    roots = np.exp(2j * np.pi * (np.arange(contour_points) + 0.5) / contour_points)
    LR = h * L[:, np.newaxis] + roots[np.newaxis, :]
    eLR = np.exp(LR)
    LR3 = LR ** 3

    Q = h * np.mean((np.exp(LR / 2) - 1) / LR, axis=1)
    f1 = h * np.mean((-4 - LR + eLR * (4 - 3 * LR + LR ** 2)) / LR3, axis=1)
    f2 = h * np.mean((2 + LR + eLR * (LR - 2)) / LR3, axis=1)
    f3 = h * np.mean((-4 - 3 * LR - LR ** 2 + eLR * (4 - LR)) / LR3, axis=1)
    return ETDTables(E, E2, Q, f1, f2, f3)


def tables_for(state: StepperState, model, dt, eps) -> ETDTables:
    tables = state.cache.get(model, state.grid, dt, eps)
    if tables is None:
        logger.debug('ETDRK4 tables for %s, dt=%g, eps=%g', model.name, dt, eps)
        tables = state.cache.put(model, state.grid, dt, eps,
                                 etdrk4_tables(model, state.grid, dt, eps))
    return tables


def etdrk4_step(state: StepperState, dt, model, eps, nonlinear=None) -> StepperState:
    """One ETDRK4 step; ``nonlinear`` overrides the model's N(u_hat) when given."""
    grid = state.grid
    if nonlinear is None:
        def nonlinear(u_hat):
            return nonlinear_hat(model, grid, u_hat, eps)

    E, E2, Q, f1, f2, f3 = tables_for(state, model, dt, eps)
    v = state.u_hat.coeffs

    Nv = nonlinear(v)
    a = E2 * v + Q * Nv
    Na = nonlinear(a)
    b = E2 * v + Q * Na
    Nb = nonlinear(b)
    c = E2 * a + Q * (2 * Nb - Nv)
    Nc = nonlinear(c)
    v_new = E * v + f1 * Nv + 2 * f2 * (Na + Nb) + f3 * Nc

    if not np.all(np.isfinite(v_new)):
        raise BlowupSuspectedError('Non-finite ETDRK4 stage values', t=state.t,
                                   last_state=state, dt=dt)
    return state.advanced(dt, v_new)
