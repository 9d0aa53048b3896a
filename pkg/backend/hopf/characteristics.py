"""Dispersionless solution u(x, t) = phi(xi), x = xi + t a(u), by characteristics.

Everything is parametrised by the foot point xi rather than by an inverse
branch Phi(u), so the same code serves every monotone piece of the data. The
derivatives follow from xi_x = 1/J with J = 1 + t a'(phi) phi'.
"""
import logging

import numpy as np

from breakup.exceptions import MultivaluedRegionError, NearCausticError

logger = logging.getLogger(__name__)

HOPF_TOL = 1e-14
CONTRACTION_LIMIT = 0.9
MAX_FIXED_POINT = 500
MAX_NEWTON = 200
FOLD_SAMPLES = 8193
CAUSTIC_TOL = 1e-13


def _speed_bounds(a, data, samples=2001):
    u = np.linspace(*data.value_range, samples)
    speed = a(u)
    return float(np.min(speed)), float(np.max(speed))


def _jacobian(a, data, xi, t):
    return 1 + t * a(data(xi), 1) * data(xi, 1)


def fold_intervals(a, data, t, xi_range, samples=FOLD_SAMPLES):
    """x-intervals reached by more than one characteristic at time t."""
    if t == 0:
        return []
    xi = np.linspace(*xi_range, samples)
    x = xi + t * a(data(xi))
    negative = _jacobian(a, data, xi, t) < 0
    intervals = []
    edges = np.flatnonzero(np.diff(negative.astype(int)))
    starts = list(edges[~negative[edges]] + 1)
    ends = list(edges[negative[edges]])
    if negative[0]:
        starts.insert(0, 0)
    if negative[-1]:
        ends.append(samples - 1)
    for i0, i1 in zip(starts, ends):
        window = x[max(i0 - 1, 0):min(i1 + 2, samples)]
        lo, hi = float(window.min()), float(window.max())
        if hi - lo > 1e-12:
            intervals.append((lo, hi))
    return intervals


def _check_single_valued(a, data, x, t, bounds):
    lo_speed, hi_speed = bounds
    xi_range = (float(np.min(x)) - t * hi_speed, float(np.max(x)) - t * lo_speed)
    if t < 0:
        xi_range = (float(np.min(x)) - t * lo_speed, float(np.max(x)) - t * hi_speed)
    for lo, hi in fold_intervals(a, data, t, xi_range):
        inside = (x > lo) & (x < hi)
        if np.any(inside):
            raise MultivaluedRegionError(
                'Characteristics cross: the dispersionless solution is multivalued here',
                bracket=(lo, hi), t=t, count=int(np.count_nonzero(inside)))


def _newton_on_foot(a, data, x, t, xi, lo, hi, tol):
    """Safeguarded Newton for F(xi) = xi + t a(phi(xi)) - x, F increasing on the bracket."""
    for _ in range(MAX_NEWTON):
        F = xi + t * a(data(xi)) - x
        done = np.abs(F) <= tol * np.maximum(1.0, np.abs(x))
        if np.all(done):
            return xi, True
        lo = np.where(F < 0, xi, lo)
        hi = np.where(F > 0, xi, hi)
        J = _jacobian(a, data, xi, t)
        with np.errstate(divide='ignore', invalid='ignore'):
            step = xi - F / J
        bisect = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        xi = np.where(done, xi, np.where(bisect, 0.5 * (lo + hi), step))
    F = xi + t * a(data(xi)) - x
    return xi, bool(np.all(np.abs(F) <= tol * np.maximum(1.0, np.abs(x))))


def foot_points(a, data, x, t, tol=HOPF_TOL):
    """xi with x = xi + t a(phi(xi)) for every x; vectorised."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if t == 0:
        return x.copy()
    bounds = _speed_bounds(a, data)
    _check_single_valued(a, data, x, t, bounds)

    u = data(x)
    xi = x - t * a(u)
    slow = np.zeros(x.shape, dtype=bool)
    for _ in range(MAX_FIXED_POINT):
        factor = np.abs(t * a(u, 1) * data(xi, 1))
        slow |= factor >= CONTRACTION_LIMIT
        u_new = data(xi)
        xi_new = x - t * a(u_new)
        change = np.abs(u_new - u)
        u, xi = np.where(slow, u, u_new), np.where(slow, xi, xi_new)
        if np.all(slow | (change <= tol)):
            break
    slow |= np.abs(data(xi) - data(x - t * a(data(xi)))) > tol

    if np.any(slow):
        logger.debug('Newton on %d of %d foot points (t=%g)', np.count_nonzero(slow), x.size, t)
        lo_speed, hi_speed = bounds if t > 0 else bounds[::-1]
        lo, hi = x[slow] - t * hi_speed, x[slow] - t * lo_speed
        solved, ok = _newton_on_foot(a, data, x[slow], t, xi[slow], lo, hi, tol)
        if not ok:
            raise MultivaluedRegionError('Characteristic solve did not converge',
                                         bracket=(float(x[slow].min()), float(x[slow].max())), t=t)
        xi = xi.copy()
        xi[slow] = solved
    return xi


def _shaped(x, values):
    return float(values[0]) if np.ndim(x) == 0 else values


def hopf_solve(a, data, x, t, tol=HOPF_TOL):
    """u(x, t) of u_t + a(u) u_x = 0 with u(x, 0) = data(x)."""
    return _shaped(x, data(foot_points(a, data, x, t, tol)))


def implicit_residual(a, data, x, t, u):
    """|u - phi(x - t a(u))|, zero exactly on the characteristic relation."""
    x = np.asarray(x, dtype=float)
    return np.abs(u - data(x - t * a(u)))


def hopf_derivatives(a, data, x, t, tol=HOPF_TOL, caustic_tol=CAUSTIC_TOL):
    """(u_x, u_xx, u_xxx) by implicit differentiation along characteristics."""
    xi = foot_points(a, data, x, t, tol)
    u = data(xi)
    p1, p2, p3 = data(xi, 1), data(xi, 2), data(xi, 3)
    a1, a2, a3 = a(u, 1), a(u, 2), a(u, 3)
    J = 1 + t * a1 * p1
    if np.any(np.abs(J) < caustic_tol):
        where = int(np.argmin(np.abs(J)))
        raise NearCausticError('Characteristic Jacobian vanishes',
                               x=float(np.atleast_1d(x)[where]), t=t, jacobian=float(J[where]))
    J1 = t * (a2 * p1 ** 2 + a1 * p2)
    J2 = t * (a3 * p1 ** 3 + 3 * a2 * p1 * p2 + a1 * p3)
    second_numerator = p2 * J - p1 * J1
    u_x = p1 / J
    u_xx = second_numerator / J ** 3
    u_xxx = (p3 * J - p1 * J2) / J ** 4 - 3 * second_numerator * J1 / J ** 5
    return _shaped(x, u_x), _shaped(x, u_xx), _shaped(x, u_xxx)
