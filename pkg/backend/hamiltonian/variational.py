import numpy as np
from scipy import fft

from spectral.models import RealField
from spectral.transforms import SpectralJet, differentiate


def _jet_arrays(density, jet):
    order = max(density.jet_order, 0)
    return tuple(jet[m] if m <= order else None for m in range(4))


def variational_derivative(density, grid, u_hat, eps):
    """h_u - D h_ux + D^2 h_uxx - D^3 h_uxxx on the grid, D spectral."""
    jet = SpectralJet(grid, u_hat)
    arrays = _jet_arrays(density, jet)
    result = density.dh_du(*arrays, eps=eps)
    for variable in range(1, density.jet_order + 1):
        partial = density.partial(variable, *arrays, eps=eps)
        result = result + (-1) ** variable * differentiate(grid, partial, variable)
    return result


def euler_lagrange(density, u: RealField, eps) -> RealField:
    u.require_valid()
    values = variational_derivative(density, u.grid, fft.fft(u.values), eps)
    return RealField(u.grid, values)


def functional_value(density, u: RealField, eps):
    """Grid quadrature of the density; spectrally accurate on the periodic domain."""
    u.require_valid()
    jet = SpectralJet.from_values(u.grid, u.values)
    return float(np.sum(density.h(*_jet_arrays(density, jet), eps=eps)) * u.grid.spacing)


def poisson_bracket(density_h, density_f, u: RealField, eps):
    """Integral of (dH/du) * d/dx (dF/du) over the period."""
    u.require_valid()
    u_hat = fft.fft(u.values)
    grad_h = variational_derivative(density_h, u.grid, u_hat, eps)
    grad_f = variational_derivative(density_f, u.grid, u_hat, eps)
    return float(np.sum(grad_h * differentiate(u.grid, grad_f, 1)) * u.grid.spacing)


def bracket_coefficients(density_h, density_f, u: RealField):
    """Coefficients B_m of {H, F}(eps) = sum_m B_m eps**m.

    Returns (coefficients, scales): scales[m] is the quadrature of the absolute
    integrand contributing to B_m, the natural yardstick for cancellation.
    """
    u.require_valid()
    grid = u.grid
    u_hat = fft.fft(u.values)
    grads_h = {m: variational_derivative(density_h.order_part(m), grid, u_hat, 1.0)
               for m in density_h.eps_powers}
    fluxes_f = {m: differentiate(grid, variational_derivative(density_f.order_part(m), grid, u_hat, 1.0), 1)
                for m in density_f.eps_powers}
    coefficients, scales = {}, {}
    for i, grad in grads_h.items():
        for j, flux in fluxes_f.items():
            integrand = grad * flux
            coefficients[i + j] = coefficients.get(i + j, 0.0) + float(np.sum(integrand) * grid.spacing)
            scales[i + j] = scales.get(i + j, 0.0) + float(np.sum(np.abs(integrand)) * grid.spacing)
    return coefficients, scales
