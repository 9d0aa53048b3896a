"""Gradient catastrophe of the dispersionless solution.

With x = t a(u) + Phi(u) on one inverse branch, the first breakup is the
point where a' t + Phi' = 0 and a'' t + Phi'' = 0 with the smallest positive
t. The first equation gives t(u) = -Phi'/a'; the second is scanned for a sign
change along the branch and polished as a 2x2 system.
"""
import logging

import numpy as np
from scipy import optimize

from breakup.exceptions import CriticalPointError, GenericityError
from equations.models import ModelKind
from .data import sech2_data
from .models import CriticalPoint

logger = logging.getLogger(__name__)

SCAN_SAMPLES = 4001
RESIDUAL_TOL = 1e-10
STRENGTH_STEPS = (0.04, 0.02, 0.01, 0.005)


def genkdv_critical_values(n):
    """Closed forms (u_c, t_c, k) for a(u) = 6 u^n and sech^2 data."""
    n = int(n)
    u_c = 2 * n / (2 * n + 1)
    t_c = (1 + 2 * n) ** (n + 0.5) / (6 * (2 * n) ** (n + 1))
    k = (2 * n + 1) ** 4.5 / (96 * n ** 2)
    return u_c, t_c, k


def _system(a, branch):
    def equations(z):
        u, t = z
        return np.array([a(u, 1) * t + branch(u, 1), a(u, 2) * t + branch(u, 2)])

    def jacobian(z):
        u, t = z
        return np.array([[a(u, 2) * t + branch(u, 2), a(u, 1)],
                         [a(u, 3) * t + branch(u, 3), a(u, 2)]])

    return equations, jacobian


def _scan_branch(a, branch, samples=SCAN_SAMPLES):
    """Brackets (u0, u1) of sign changes of a'' t(u) + Phi'' with t(u) > 0."""
    lo, hi = branch.u_range
    span = hi - lo
    u = np.linspace(lo + 1e-6 * span, hi - 1e-6 * span, samples)
    with np.errstate(divide='ignore', invalid='ignore'):
        t = -branch(u, 1) / a(u, 1)
        g = a(u, 2) * t + branch(u, 2)
    usable = np.isfinite(t) & np.isfinite(g) & (t > 0)
    brackets = []
    for i in range(samples - 1):
        if usable[i] and usable[i + 1] and np.sign(g[i]) != np.sign(g[i + 1]):
            brackets.append((u[i], u[i + 1]))
    return brackets


def _polish(a, branch, bracket):
    def g(u):
        return a(u, 2) * (-branch(u, 1) / a(u, 1)) + branch(u, 2)

    u0 = optimize.brentq(g, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    t0 = float(-branch(u0, 1) / a(u0, 1))
    equations, jacobian = _system(a, branch)
    solution = optimize.root(equations, [u0, t0], jac=jacobian, method='hybr', tol=1e-15)
    u_c, t_c = (solution.x if solution.success else (u0, t0))
    return float(u_c), float(t_c)


def strength_limit(a, branch, u_c, t_c, x_c, steps=STRENGTH_STEPS):
    """-6 lim (x - x_c)/(u - u_c)^3 from symmetric difference quotients.

    The quotient averaged over +-d is even in d, so a polynomial in d^2 through
    the samples extrapolates it to d = 0.
    """
    lo, hi = branch.u_range
    room = 0.25 * min(u_c - lo, hi - u_c)
    d = np.asarray(steps, dtype=float) * min(1.0, room / max(steps))

    def quotient(delta):
        u = u_c + delta
        x = t_c * a(u) + branch(u)
        return -6 * (x - x_c) / delta ** 3

    symmetric = 0.5 * (quotient(d) + quotient(-d))
    coefficients = np.polynomial.polynomial.polyfit(d ** 2, symmetric, len(d) - 1)
    return float(coefficients[0])


def critical_point(a, data=None, branch=None) -> CriticalPoint:
    """First gradient catastrophe of u_t + a(u) u_x = 0 with initial data ``data``.

    Without ``branch`` every inverse branch of the data is scanned and the
    earliest breakup wins.
    """
    data = data or sech2_data()
    names = [branch] if branch else list(data.branches)
    candidates = []
    for name in names:
        inverse = data.branch(name)
        for bracket in _scan_branch(a, inverse):
            u_c, t_c = _polish(a, inverse, bracket)
            if t_c > 0:
                candidates.append((t_c, u_c, inverse))
    if not candidates:
        raise CriticalPointError('No gradient catastrophe found on the scanned branches',
                                 branches=names)
    t_c, u_c, inverse = min(candidates, key=lambda item: item[0])

    x_c = float(t_c * a(u_c) + inverse(u_c))
    residuals = (
        abs(float(a(u_c, 1) * t_c + inverse(u_c, 1))),
        abs(float(a(u_c, 2) * t_c + inverse(u_c, 2))),
        abs(float(x_c - t_c * a(u_c) - inverse(u_c))),
    )
    scale = max(1.0, abs(float(inverse(u_c, 2))))
    if max(residuals) > RESIDUAL_TOL * scale:
        raise CriticalPointError('Critical point system not solved to tolerance',
                                 residuals=residuals, u_c=u_c, t_c=t_c)

    k = float(-(a(u_c, 3) * t_c + inverse(u_c, 3)) / 6)
    if k == 0 or abs(k) < 1e-12 * max(1.0, abs(float(inverse(u_c, 3)))):
        raise GenericityError('Breakup strength k vanishes: non-generic critical point', u_c=u_c)
    if float(a(u_c, 1)) * k <= 0:
        raise GenericityError("a'(u_c) k must be positive", u_c=u_c, k=k)

    k_limit = 6 * k
    estimate = strength_limit(a, inverse, u_c, t_c, x_c)
    point = CriticalPoint(x_c, float(t_c), u_c, k, k_limit, estimate, residuals, inverse.name)
    if point.disagreement:
        logger.warning('Strength from the limit definition (%.10g) differs from 6k (%.10g)',
                       estimate, k_limit)
    logger.info('Critical point on branch %s: x_c=%.10g, t_c=%.10g, u_c=%.10g, k=%.10g',
                inverse.name, x_c, t_c, u_c, k)
    return point


def critical_point_for_model(model, data=None) -> CriticalPoint:
    point = critical_point(model.a, data)
    if model.kind == ModelKind.GEN_KDV and (data is None or data.name == 'sech2'):
        expected = genkdv_critical_values(model.params['n'])
        found = (point.u_c, point.t_c, point.k)
        mismatch = max(abs(f - e) / abs(e) for f, e in zip(found, expected))
        if mismatch > 1e-10:
            logger.warning('%s: critical values differ from the closed forms by %.2e',
                           model.name, mismatch)
    return point
