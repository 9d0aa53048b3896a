"""PI2 description of the solution near the point of gradient catastrophe."""
import logging

import numpy as np

from breakup.exceptions import DegenerateDispersionError, GenericityError, OutOfWindowError
from .models import MultiscaleConstants

logger = logging.getLogger(__name__)

WINDOW_X = 3.0
WINDOW_T = 2.0


def multiscale_constants(model, point) -> MultiscaleConstants:
    """alpha, beta, gamma for ``model`` at the critical point ``point``.

    The strength entering the scales is ``point.k_limit``, the limit
    -6 (x - x_c)/(u - u_c)^3, so that the far field of U reproduces the
    cube-root profile of the dispersionless solution at t_c.
    """
    u_c = point.u_c
    a0, a1 = float(model.a(u_c)), float(model.a(u_c, 1))
    b1 = float(model.b1(u_c))
    k = float(point.k_limit)
    if b1 == 0 or abs(b1) < 1e-14 * max(1.0, abs(a1)):
        raise DegenerateDispersionError('b1(u_c) vanishes: no second-order dispersion at breakup',
                                        model=model.name, u_c=u_c)
    if a1 * k <= 0:
        raise GenericityError("a'(u_c) k must be positive", a1=a1, k=k)
    if b1 / a1 <= 0:
        raise GenericityError('b1/a\' must be positive at u_c for real scales', b1=b1, a1=a1)
    constants = MultiscaleConstants(
        alpha=(12 * b1 / (a1 * k ** 2)) ** (1 / 7),
        beta=(12 ** 3 * k * b1 ** 3 / a1 ** 3) ** (1 / 7),
        gamma=(12 ** 2 * k ** 3 * b1 ** 2 / a1 ** 9) ** (1 / 7),
        a0=a0, a0_prime=a1, b1=b1, k=k, x_c=point.x_c, t_c=point.t_c, u_c=u_c,
    )
    logger.info('%s: alpha=%.6g beta=%.6g gamma=%.6g', model.name, constants.alpha,
                constants.beta, constants.gamma)
    return constants


def trust_window(constants, eps, window_x=WINDOW_X, window_t=WINDOW_T):
    """Half-widths (W_x, W_t) in physical units around the moving breakup point."""
    return (window_x * constants.beta * eps ** (6 / 7),
            window_t * constants.gamma * eps ** (4 / 7))


def required_times(constants, t, eps):
    """Scaled times T the PI2 table must cover to evaluate at physical times t."""
    return np.atleast_1d(constants.scaled(constants.x_c, t, eps)[1])


def multiscale_eval(x, t, eps, constants, table, window_x=WINDOW_X, window_t=WINDOW_T):
    """u_c + alpha eps^(2/7) U(X, T) for points inside the trust window."""
    X, T = constants.scaled(x, t, eps)
    if np.any(np.abs(X) > window_x * (1 + 1e-12)) or np.any(np.abs(T) > window_t * (1 + 1e-12)):
        raise OutOfWindowError('Point outside the trust window of the multiscale formula',
                               max_X=float(np.max(np.abs(X))), max_T=float(np.max(np.abs(T))))
    if not np.all(table.covers(T)):
        raise OutOfWindowError('Scaled time outside the tabulated PI2 range',
                               T_range=table.T_range, max_T=float(np.max(np.abs(T))))
    return constants.u_c + constants.alpha * eps ** (2 / 7) * table(X, T)
