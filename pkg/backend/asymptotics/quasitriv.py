"""Quasitriviality corrections to the dispersionless solution away from breakup.

The transformation v -> v + eps^2 [(c/2)(v_xxx/v_x - v_xx^2/v_x^2) + c' v_xx
+ c'' v_x^2 / 2] maps solutions of v_t + a(v) v_x = 0 to solutions of the
dispersive equation up to O(eps^4). Starting the dispersionless flow from
data shifted by minus the same bracket makes the result match the original
initial data to O(eps^4).

Every formula divides by v_x, so the x-window must stay away from extrema of
v. Derivatives of the dispersionless background come from the characteristic
formulas; ``window_jet`` supplies spectral ones for fields off the PDE solver.
"""
import logging

import numpy as np

from breakup.exceptions import NearCausticError, NearCriticalError
from hopf.characteristics import foot_points, hopf_derivatives
from hopf.jets import hopf_jet
from spectral.transforms import SpectralJet
from .models import QuasiTrivData

logger = logging.getLogger(__name__)

V_FLOOR = 1e-6
DENOMINATOR_TOL = 1e-10


def _require_monotone(v_x, floor, where='window'):
    small = np.abs(v_x) < floor
    if np.any(small):
        raise NearCriticalError(f'|v_x| below {floor:g} on the {where}: transformation invalid',
                                count=int(np.count_nonzero(small)),
                                min_abs_vx=float(np.min(np.abs(v_x))))


def transform_bracket(jet, c):
    """(c/2)(v3/v1 - v2^2/v1^2) + c' v2 + c'' v1^2 / 2 for a jet (v, v1, v2, v3, ...)."""
    v, v1, v2, v3 = jet[:4]
    return (c(v) / 2 * (v3 / v1 - v2 ** 2 / v1 ** 2) + c(v, 1) * v2
            + 0.5 * c(v, 2) * v1 ** 2)


def window_jet(field, window, order=3):
    """Nodes in ``window`` and the spectral jet (v, v_x, ...) of ``field`` there."""
    lo, hi = window
    nodes = field.grid.nodes
    inside = (nodes >= lo) & (nodes <= hi)
    spectral = SpectralJet.from_values(field.grid, field.values)
    jet = tuple(field.values[inside] if k == 0 else spectral[k][inside]
                for k in range(order + 1))
    return nodes[inside], jet


def quasitriv_transform(jet, c, eps, v_floor=V_FLOOR):
    """v + eps^2 bracket(v) on the points of ``jet``."""
    jet = tuple(np.asarray(item, dtype=float) for item in jet)
    _require_monotone(jet[1], v_floor)
    return jet[0] + eps ** 2 * transform_bracket(jet, c)


def data_correction(data, c, xi):
    """The bracket of the transformation evaluated on the initial profile at xi."""
    jet = tuple(data(xi, k) for k in range(4))
    return transform_bracket(jet, c)


def correction_rhs(branch, c, v):
    """Right-hand side of the linear equation for w, written with the inverse branch Phi."""
    P1, P2, P3 = branch(v, 1), branch(v, 2), branch(v, 3)
    return (c(v) / 2 * (2 * P2 ** 2 - P1 * P3) / P1 ** 3 - c(v, 1) * P2 / P1 ** 2
            + c(v, 2) / (2 * P1))


def quasitriv_data(data, c, a, x, t, eps, v_floor=V_FLOOR,
                   denominator_tol=DENOMINATOR_TOL) -> QuasiTrivData:
    """Background v, shift w and jet of v on the points x at time t.

    The dispersionless flow started from phi - eps^2 B(phi) equals v + eps^2 w
    + O(eps^4) with w (Phi'(v) + t a'(v)) = -RHS(v), i.e. w = -B(xi)/J along
    the characteristic through x, J = 1 + t a'(phi(xi)) phi'(xi).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = foot_points(a, data, x, t)
    v = data(xi)
    slope = data(xi, 1)
    _require_monotone(slope, v_floor, where='initial data')
    J = 1 + t * a(v, 1) * slope
    denominator = J / slope
    if np.any(np.abs(denominator) < denominator_tol):
        where = int(np.argmin(np.abs(denominator)))
        raise NearCausticError('Denominator of the correction vanishes', x=float(x[where]), t=t)
    w = -data_correction(data, c, xi) / J
    jet = (v,) + tuple(hopf_derivatives(a, data, x, t))
    _require_monotone(jet[1], v_floor)
    return QuasiTrivData(x=x, t=t, eps=eps, c=c, v=v, w=w, jet=jet)


def corrected_hopf(data, c, a, x, t, eps, **options):
    """v + eps^2 w: the dispersionless solution from the shifted data, to O(eps^4)."""
    return quasitriv_data(data, c, a, x, t, eps, **options).corrected


def quasitriv_solution(data, model, x, t, eps, t_c=None, **options):
    """v + eps^2 w + eps^2 bracket(v) on the points x."""
    if t_c is not None and t >= t_c:
        raise NearCausticError('Quasitriviality solution requested at or after breakup',
                               t=t, t_c=t_c)
    quasi = quasitriv_data(data, model.c, model.a, x, t, eps, **options)
    u = quasi.corrected + eps ** 2 * transform_bracket(quasi.jet, model.c)
    logger.debug('Quasitriviality solution at t=%g, eps=%g on %d points', t, eps, u.size)
    return u


def discrepancy_leading(jet, c, v_floor=V_FLOOR):
    """Leading eps^-4 residual of the transformed v under u_t + u u_x + eps^2 (c u_xx + c' u_x^2/2)_x.

    ``jet`` is (v, v_x, ..., v_xxxxxx); ``c`` supplies five derivatives.
    """
    v, v1, v2, v3, v4, v5, v6 = (np.asarray(item, dtype=float) for item in jet[:7])
    _require_monotone(v1, v_floor)
    c0, c1, c2, c3, c4, c5 = (c(v, k) for k in range(6))
    return (
        c0 ** 2 * (23 * v2 ** 5 / (2 * v1 ** 5) - 115 * v2 ** 3 * v3 / (4 * v1 ** 4)
                   + 39 * v2 ** 2 * v4 / (4 * v1 ** 3) + 57 * v2 * v3 ** 2 / (4 * v1 ** 3)
                   - 5 * v2 * v5 / (2 * v1 ** 2) - 19 * v3 * v4 / (4 * v1 ** 2) + v6 / (2 * v1))
        + c0 * c1 * (-35 * v2 ** 4 / (4 * v1 ** 3) + 19 * v2 ** 2 * v3 / v1 ** 2
                     - 7 * v2 * v4 / v1 - 23 * v3 ** 2 / (4 * v1) + 7 * v5 / 2)
        + c0 * c2 * (3 * v2 ** 3 / (2 * v1) + 13 * v1 * v4 / 2 + 3 * v2 * v3)
        + c0 * c3 * (15 * v1 ** 2 * v3 / 2 + 8 * v1 * v2 ** 2)
        + 11 / 2 * c0 * c4 * v1 ** 3 * v2 + 0.5 * c0 * c5 * v1 ** 5
        + c1 ** 2 * (3 * v2 ** 3 / (2 * v1) + 4 * v1 * v4 + v2 * v3 / 2)
        + c1 * c2 * (21 * v1 ** 2 * v3 / 2 + 10 * v1 * v2 ** 2)
        + 9 * c1 * c3 * v1 ** 3 * v2 + c1 * c4 * v1 ** 5
        + 5 * c2 ** 2 * v1 ** 3 * v2 + 5 / 4 * c2 * c3 * v1 ** 5
    )


def hopf_discrepancy(data, model, x, t, v_floor=V_FLOOR):
    """``discrepancy_leading`` on the dispersionless solution of a model with a(u) = u.

    The jet up to v_xxxxxx comes from the characteristic series, so the
    points must stay off the caustic.
    """
    return discrepancy_leading(hopf_jet(model.a, data, x, t, order=6), model.c, v_floor)
