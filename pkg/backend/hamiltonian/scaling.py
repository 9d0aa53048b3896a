"""Small-eps scaling of Poisson brackets between commuting Hamiltonians.

The bracket of two eps-graded densities is a polynomial in eps whose
coefficients are computed once on the test field. Coefficients that cancel to
round-off (relative to the quadrature of the absolute integrand) are treated as
zero, and the surviving polynomial is evaluated on the eps sweep and fitted.
"""
import logging
from typing import Dict, NamedTuple, Optional

import numpy as np

from diagnostics.fits import loglog_fit
from diagnostics.models import FitResult
from equations.functions import ZERO, as_function, polynomial
from spectral.models import PeriodicGrid
from .densities import (
    commuting_coefficients, extension_commuting_density, hf_density, sixth_order_terms,
)
from .models import HamiltonianDensity, Order6Extension
from .variational import bracket_coefficients

logger = logging.getLogger(__name__)

CANCELLATION_TOLERANCE = 1e-9
ZERO_BRACKET = 1e-14
DEFAULT_EPS = tuple(10 ** (-2 - 0.25 * j) for j in range(5))


class BracketScaling(NamedTuple):
    eps: np.ndarray
    values: np.ndarray
    coefficients: Dict[int, float]
    scales: Dict[int, float]
    leading_order: Optional[int]
    fit: Optional[FitResult]

    @property
    def vanishes(self):
        return self.fit is None

    @property
    def slope(self):
        return None if self.fit is None else self.fit.slope


def bracket_grid(half_width=np.pi, size=64):
    return PeriodicGrid(half_width, size)


def default_test_field(grid=None):
    grid = grid or bracket_grid()
    return grid.sample(lambda x: 0.5 + 0.3 * np.sin(np.pi * x / grid.half_width))


def random_test_fields(grid, count, rng):
    """Smooth positive periodic fields with two random harmonics."""
    scale = np.pi / grid.half_width
    fields = []
    for _ in range(count):
        phase, shift = rng.uniform(0, 2 * np.pi, 2)
        amp1, amp2 = rng.uniform(0.15, 0.3), rng.uniform(0.0, 0.1)
        fields.append(grid.sample(lambda x: 0.5 + amp1 * np.sin(scale * x + phase)
                                  + amp2 * np.cos(2 * scale * x + shift)))
    return fields


def random_polynomial(rng, degree=None):
    """Polynomial of degree 3 to 5 with nonvanishing third derivative."""
    degree = degree or int(rng.integers(3, 6))
    coeffs = rng.uniform(-1.0, 1.0, degree + 1)
    coeffs[degree] = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.0)
    return polynomial(*coeffs)


def scaling_of(density_h, density_f, u_test, eps_list=DEFAULT_EPS,
               tolerance=CANCELLATION_TOLERANCE) -> BracketScaling:
    eps = np.asarray(eps_list, dtype=float)
    coefficients, scales = bracket_coefficients(density_h, density_f, u_test)
    surviving = {m: value for m, value in coefficients.items()
                 if abs(value) > tolerance * max(scales[m], 1e-300)}
    leading = min(surviving, default=None)
    values = np.abs(sum((value * eps ** m for m, value in surviving.items()), np.zeros_like(eps)))
    if leading is None or max(abs(value) for value in surviving.values()) < ZERO_BRACKET:
        logger.info('Bracket %s vs %s indistinguishable from zero', density_h.tag, density_f.tag)
        return BracketScaling(eps, values, coefficients, scales, None, None)
    fit = loglog_fit(eps, values)
    logger.info('Bracket %s vs %s: leading order eps^%d, %s',
                density_h.tag, density_f.tag, leading, fit)
    return BracketScaling(eps, values, coefficients, scales, leading, fit)


def bracket_scaling(f, g, c, p, eps_list=DEFAULT_EPS, u_test=None, extension=None):
    """Scaling of {H_f, H_g}(eps) at u_test.

    With ``extension`` (an Order6Extension for the same c, p) both densities
    carry their eps^6 layers.
    """
    if u_test is None:
        u_test = default_test_field()
    if extension is None:
        h_f, h_g = hf_density(f, c, p, tag='H_f'), hf_density(g, c, p, tag='H_g')
    else:
        h_f = extension_commuting_density(extension, f, tag='H_f')
        h_g = extension_commuting_density(extension, g, tag='H_g')
    return scaling_of(h_f, h_g, u_test, eps_list)


def minimum_slope(f, g, c, p, fields, eps_list=DEFAULT_EPS, extension=None):
    """Smallest fitted slope over several test fields; None when every bracket vanishes."""
    slopes = [result.slope for result in
              (bracket_scaling(f, g, c, p, eps_list, u, extension) for u in fields)
              if not result.vanishes]
    return min(slopes, default=None)


def beta_only_densities(f, p, beta):
    """Order-6 layers available when c = 0: the alpha term is dropped."""
    ext = Order6Extension(c=ZERO, p=as_function(p), beta=as_function(beta), alpha=ZERO)
    alpha_f, beta_f, gamma_f, delta_f = commuting_coefficients(ext, f)
    base = hf_density(f, ZERO, p, tag='H_f')
    return HamiltonianDensity(base.terms + sixth_order_terms(alpha_f, beta_f, gamma_f, delta_f),
                              tag='H_f[c=0]')


def obstruction_demo(f, g, p, betas, eps_list=DEFAULT_EPS, u_test=None):
    """Slopes of {H_f, H_g} with c = 0 for each trial beta.

    Exploratory: no order-6 layer is expected to lift the slope to 8 here.
    """
    if u_test is None:
        u_test = default_test_field()
    report = {}
    for beta in betas:
        result = scaling_of(beta_only_densities(f, p, beta), beta_only_densities(g, p, beta),
                            u_test, eps_list)
        report[beta] = result
        logger.info('c = 0, beta = %s: slope %s', beta,
                    'n/a' if result.vanishes else f'{result.slope:.3f}')
    return report
