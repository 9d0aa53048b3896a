"""Commuting Hamiltonians of the perturbed Hopf hierarchy.

``hf_density`` is the order-4 commuting density for an arbitrary f(u);
``order6_extension`` adds the eps^6 layer, which exists only when c(u) has no
zero on the working range.
"""
import logging

import numpy as np

from breakup.exceptions import ObstructionError
from equations.functions import as_function, monomial
from .models import DensityTerm, HamiltonianDensity, Order6Extension

logger = logging.getLogger(__name__)

CUBIC = monomial(1.0 / 6, 3)


def _derivatives(func, count):
    func = as_function(func)
    return [func.derivative(n) for n in range(count + 1)]


def hf_density(f, c, p, tag='h_f'):
    """f - (eps^2/2) c f''' u_x^2 + eps^4 [(p f''' + 3/10 c^2 f'''') u_xx^2 - (...) u_x^4]."""
    f = _derivatives(f, 6)
    c = _derivatives(c, 2)
    p = _derivatives(p, 1)
    quartic = (p[1] * f[4] + 0.75 * c[0] * c[2] * f[4] + p[0] * f[5]
               + 0.75 * c[0] * c[1] * f[5] + 0.25 * c[0] * c[0] * f[6])
    return HamiltonianDensity((
        DensityTerm(f[0]),
        DensityTerm(-0.5 * c[0] * f[3], (2, 0, 0), 2),
        DensityTerm(p[0] * f[3] + 0.3 * c[0] * c[0] * f[4], (0, 2, 0), 4),
        DensityTerm(quartic * (-1.0 / 6), (4, 0, 0), 4),
    ), tag=tag)


def extension_alpha(c, p):
    """(1/28)[80 p^2/c - 67 p c' + 33 c p' + 12 c c'^2 - 9 c^2 c'']."""
    c = _derivatives(c, 2)
    p = _derivatives(p, 1)
    bracket = (80.0 * p[0] * p[0] / c[0] - 67.0 * p[0] * c[1] + 33.0 * c[0] * p[1]
               + 12.0 * c[0] * c[1] * c[1] - 9.0 * c[0] * c[0] * c[2])
    return bracket * (1.0 / 28)


def _check_nonvanishing(c, u_range, samples=401):
    u = np.linspace(*u_range, samples)
    values = np.asarray(c(u), dtype=float)
    scale = max(float(np.max(np.abs(values))), 1.0)
    small = np.abs(values) <= 1e-12 * scale
    if np.any(small) or np.any(np.sign(values[1:]) != np.sign(values[:-1])):
        where = float(u[np.argmax(small)]) if np.any(small) else None
        raise ObstructionError(
            'c(u) vanishes on the working range: the order-4 Hamiltonian cannot be '
            'included into a 9-integrable family', u_range=tuple(u_range), u=where)


def order6_extension(c, p, beta=0.0, u_range=(0.05, 1.05)) -> Order6Extension:
    c, p, beta = as_function(c), as_function(p), as_function(beta)
    _check_nonvanishing(c, u_range)
    alpha = extension_alpha(c, p)
    logger.debug('Order-6 extension built for c=%s, p=%s', c.label, p.label)
    return Order6Extension(c=c, p=p, beta=beta, alpha=alpha)


def commuting_coefficients(ext: Order6Extension, f):
    """(alpha_f, beta_f, gamma_f, delta_f) of the eps^6 layer of the density commuting with H."""
    f = _derivatives(f, 9)
    c = _derivatives(ext.c, 5)
    p = _derivatives(ext.p, 4)
    a = _derivatives(ext.alpha, 2)
    beta = ext.beta
    c2, c3 = c[0] * c[0], c[0] * c[0] * c[0]

    alpha_f = (a[0] * f[3]
               + ((8.0 / 7) * c[0] * p[0] + (3.0 / 70) * c2 * c[1]) * f[4]
               + (9.0 / 70) * c3 * f[5])

    beta_f = (beta * f[3]
              - (1.5 * a[0] + (253.0 * p[0] * c[1] + 169.0 * c[0] * p[1]) * (1.0 / 168)
                 + c[0] * c[1] * c[1] * (1.0 / 35) + (5.0 / 56) * c2 * c[2]) * f[4]
              - ((29.0 / 21) * c[0] * p[0] + (31.0 / 70) * c2 * c[1]) * f[5]
              - c3 * f[6] * (1.0 / 7))

    gamma_f = (((3.0 / 7) * beta - (6.0 / 7) * a[1]
                + (3.0 / 35) * (c[1] * c[1] * c[1] - c2 * c[3] - 3.0 * c[0] * c[1] * c[2])
                + c[1] * p[1] - (47.0 / 14) * p[0] * c[2] - c[0] * p[2]) * f[4]
               - (2.0 * a[0] + (37.0 / 14) * p[0] * c[1]
                  + (3.0 / 35) * (c[0] * c[1] * c[1] + 11.0 * c2 * c[2])
                  + (8.0 / 7) * c[0] * p[1]) * f[5]
               - (23.0 * c[0] * p[0] + 9.0 * c2 * c[1]) * (1.0 / 14) * f[6]
               - (3.0 / 20) * c3 * f[7])

    delta_f = ((0.1 * p[1] * c[3]
                + (10.0 * c[0] * c[2] * c[3] + 7.0 * c[0] * c[1] * c[4] + c2 * c[5]) * (1.0 / 40)
                + (2.0 / 15) * p[0] * c[4] + (1.0 / 60) * c[0] * p[4]) * f[4]
               + ((1.0 / 15) * a[2] + 0.2 * p[1] * c[2] + (3.0 / 40) * c[0] * c[2] * c[2]
                  + 0.3 * p[0] * c[3] + 0.1 * c[0] * c[1] * c[3] + (1.0 / 15) * c[0] * p[3]
                  + (1.0 / 15) * c2 * c[4]) * f[5]
               + ((2.0 / 15) * a[1] + (2.0 / 15) * c[1] * p[1] + (1.0 / 3) * p[0] * c[2]
                  + (7.0 * c[0] * c[1] * c[2] + 3.0 * c2 * c[3]) * (1.0 / 40)
                  + 0.1 * c[0] * p[2]) * f[6]
               + ((1.0 / 15) * a[0] + (1.0 / 6) * p[0] * c[1] + c[0] * c[1] * c[1] * (1.0 / 16)
                  + 0.1 * c[0] * p[1] + (3.0 / 40) * c2 * c[2]) * f[7]
               + (0.05 * c[0] * p[0] + (3.0 / 80) * c2 * c[1]) * f[8]
               + c3 * f[9] * (1.0 / 240))

    return alpha_f, beta_f, gamma_f, delta_f


def sixth_order_terms(alpha, beta, gamma=None, delta=None):
    terms = [
        DensityTerm(-alpha, (0, 0, 2), 6),
        DensityTerm(-beta, (0, 3, 0), 6),
    ]
    if gamma is not None:
        terms.append(DensityTerm(-gamma, (2, 2, 0), 6))
    if delta is not None:
        terms.append(DensityTerm(-delta, (6, 0, 0), 6))
    return tuple(terms)


def extension_hamiltonian(ext: Order6Extension) -> HamiltonianDensity:
    """u^3/6 - (eps^2/2) c u_x^2 + eps^4 p u_xx^2 - eps^6 (alpha u_xxx^2 + beta u_xx^3)."""
    base = hf_density(CUBIC, ext.c, ext.p, tag='H')
    return HamiltonianDensity(base.terms + sixth_order_terms(ext.alpha, ext.beta), tag='H6')


def extension_commuting_density(ext: Order6Extension, f, tag='h_f6') -> HamiltonianDensity:
    base = hf_density(f, ext.c, ext.p, tag=tag)
    return HamiltonianDensity(base.terms + sixth_order_terms(*commuting_coefficients(ext, f)),
                              tag=tag)
