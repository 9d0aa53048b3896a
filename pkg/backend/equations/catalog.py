import logging
import numbers

import numpy as np

from breakup.exceptions import ModelConfigurationError
from hamiltonian.models import DensityTerm, HamiltonianDensity
from .functions import (
    Constant, Hyperbolic, Power, SmoothFunction, as_function, monomial, polynomial,
)
from .models import ModelKind, ModelSpec, StiffTerm

logger = logging.getLogger(__name__)

DEFAULT_U_RANGE = (0.05, 1.05)


def _no_dispersive_flux(jet, eps):
    return 0.0


def _no_frozen_dispersion(k, eps, ubar):
    return np.zeros(np.shape(k), dtype=complex)


def _genkdv_invariants(a):
    """c = 1/a', p = -(3/10) a''/a'^3."""
    inverse_speed = a.derivative().reciprocal()
    c = inverse_speed
    p = -0.3 * a.derivative(2) * inverse_speed ** 3
    return c, p


def _third_order_density(flux_potential, tag):
    """f(u) - (eps^2/2) u_x^2: Hamiltonian of u_t + a(u) u_x + eps^2 u_xxx = 0."""
    return HamiltonianDensity((
        DensityTerm(flux_potential),
        DensityTerm(Constant(-0.5), (2, 0, 0), 2),
    ), tag=tag)


def _genkdv(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ModelConfigurationError('GenKdV requires an integer n >= 1', n=n)
    n = int(n)
    a = monomial(6.0, n)
    flux = monomial(6.0 / (n + 1), n + 1)
    potential = monomial(6.0 / ((n + 1) * (n + 2)), n + 2)
    c, p = _genkdv_invariants(a)
    return dict(
        params={'n': n}, a=a, flux=flux, c=c, p=p,
        stiff_terms=(StiffTerm(3, 2, 1.0),),
        density=_third_order_density(potential, f'genkdv({n})'),
        template={1: Constant(1.0)},
    )


def _sinh_kdv():
    a = Hyperbolic(6.0, 'sinh')
    flux = Hyperbolic(6.0, 'cosh')
    potential = Hyperbolic(6.0, 'sinh')
    c, p = _genkdv_invariants(a)
    return dict(
        params={}, a=a, flux=flux, c=c, p=p,
        stiff_terms=(StiffTerm(3, 2, 1.0),),
        density=_third_order_density(potential, 'sinh-kdv'),
        template={1: Constant(1.0)},
    )


def _kawahara(alpha, beta):
    if beta == 0:
        raise ModelConfigurationError('Kawahara requires beta != 0', beta=beta)
    alpha, beta = float(alpha), float(beta)
    density = HamiltonianDensity((
        DensityTerm(monomial(1.0, 3)),
        DensityTerm(Constant(-alpha / 2), (2, 0, 0), 2),
        DensityTerm(Constant(beta / 2), (0, 2, 0), 4),
    ), tag=f'kawahara({alpha:g},{beta:g})')
    stiff = (StiffTerm(5, 4, beta),) if alpha == 0 else (StiffTerm(3, 2, alpha), StiffTerm(5, 4, beta))
    return dict(
        params={'alpha': alpha, 'beta': beta},
        a=monomial(6.0, 1), flux=monomial(3.0, 2),
        c=Constant(alpha / 6), p=Constant(beta / 12),
        stiff_terms=stiff, density=density,
        template={1: Constant(alpha), 6: Constant(beta)},
    )


def _kdv2_family(alpha):
    alpha = float(alpha)

    def dispersive_flux(jet, eps):
        return 10 * alpha * eps ** 2 * (jet[0] * jet[2] + 0.5 * jet[1] ** 2)

    def frozen_dispersion(k, eps, ubar):
        return -10 * alpha * eps ** 2 * ubar * (1j * k) ** 3

    density = HamiltonianDensity((
        DensityTerm(monomial(2.5, 4)),
        DensityTerm(monomial(-5 * alpha, 1), (2, 0, 0), 2),
        DensityTerm(Constant(0.5), (0, 2, 0), 4),
    ), tag=f'kdv2({alpha:g})')
    return dict(
        params={'alpha': alpha},
        a=monomial(30.0, 2), flux=monomial(10.0, 3),
        c=Constant(alpha / 6), p=Power((1 - alpha ** 2) / 120, -1),
        stiff_terms=(StiffTerm(5, 4, 1.0),),
        dispersive_flux=dispersive_flux, frozen_dispersion=frozen_dispersion,
        density=density, flux_jet_order=2,
        template={1: monomial(10 * alpha, 1), 2: Constant(5 * alpha), 6: Constant(1.0)},
    )


def _nonlinear_dispersion(c, p):
    c, p = _coerce_function(c, 'c'), _coerce_function(p, 'p')
    c1 = c.derivative()
    p1, p2 = p.derivative(), p.derivative(2)

    def dispersive_flux(jet, eps):
        u, ux, uxx, uxxx, uxxxx = (jet[m] for m in range(5))
        second = c.value(u) * uxx + 0.5 * c1.value(u) * ux ** 2
        fourth = (2 * p.value(u) * uxxxx + 4 * p1.value(u) * uxxx * ux
                  + 3 * p1.value(u) * uxx ** 2 + 2 * p2.value(u) * uxx * ux ** 2)
        return eps ** 2 * second + eps ** 4 * fourth

    def frozen_dispersion(k, eps, ubar):
        ik = 1j * k
        return -(eps ** 2 * float(c(ubar)) * ik ** 3 + 2 * eps ** 4 * float(p(ubar)) * ik ** 5)

    density = HamiltonianDensity((
        DensityTerm(monomial(1.0 / 6, 3)),
        DensityTerm(-0.5 * c, (2, 0, 0), 2),
        DensityTerm(p, (0, 2, 0), 4),
    ), tag=f'nonlinear-dispersion(c={c.label},p={p.label})')
    return dict(
        params={'c': c.label, 'p': p.label},
        a=monomial(1.0, 1), flux=monomial(0.5, 2), c=c, p=p,
        stiff_terms=(),
        dispersive_flux=dispersive_flux, frozen_dispersion=frozen_dispersion,
        density=density, flux_jet_order=4,
        template={1: c, 2: 0.5 * c1, 6: 2.0 * p, 7: 4.0 * p1, 8: 3.0 * p1, 9: 2.0 * p2},
    )


def _coerce_function(value, name):
    if isinstance(value, SmoothFunction):
        return value
    if isinstance(value, numbers.Real):
        return as_function(float(value))
    try:
        return polynomial(*[float(x) for x in value])
    except (TypeError, ValueError):
        raise ModelConfigurationError(f'{name} must be a smooth function or polynomial coefficients',
                                      value=repr(value))


BUILDERS = {
    ModelKind.GEN_KDV: lambda params: _genkdv(params.get('n', 1)),
    ModelKind.SINH_KDV: lambda params: _sinh_kdv(),
    ModelKind.KAWAHARA: lambda params: _kawahara(params.get('alpha', 1.0), params.get('beta', 1.0)),
    ModelKind.KDV2_FAMILY: lambda params: _kdv2_family(params.get('alpha', 1.0)),
    ModelKind.NONLINEAR_DISPERSION: lambda params: _nonlinear_dispersion(params.get('c', 0.0),
                                                                         params.get('p', 0.0)),
}


def build_model(kind, u_range=DEFAULT_U_RANGE, **params) -> ModelSpec:
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise ModelConfigurationError('Unknown model kind', kind=kind)
    parts = BUILDERS[kind](params)
    parts.setdefault('dispersive_flux', _no_dispersive_flux)
    parts.setdefault('frozen_dispersion', _no_frozen_dispersion)
    model = ModelSpec(kind=kind, **parts)
    _check_working_range(model, u_range)
    logger.debug('Built model %s', model.name)
    return model


def _check_working_range(model, u_range):
    samples = np.linspace(*u_range, 101)
    speed = model.a(samples, 1)
    crossing = (speed == 0) | (np.sign(speed) != np.sign(speed[0]))
    if np.any(crossing):
        raise ModelConfigurationError("a'(u) vanishes on the working range",
                                      u=float(samples[np.argmax(crossing)]))
    for name in ('c', 'p'):
        values = getattr(model, name)(samples)
        if not np.all(np.isfinite(values)):
            raise ModelConfigurationError(f'{name}(u) is not finite on the working range',
                                          u_range=tuple(u_range))
