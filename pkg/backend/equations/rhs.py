import logging

import numpy as np
from scipy import fft

from breakup.exceptions import SingularInvariantError
from spectral.models import RealField
from spectral.transforms import SpectralJet, resolution_ok, to_spectral
from .models import InvariantTable

logger = logging.getLogger(__name__)

RESOLUTION_WARNING = 1e-8


def nonlinear_hat(model, grid, u_hat, eps):
    """Transform of -d/dx[A(u) + dispersive flux], everything except the stiff terms."""
    jet = SpectralJet(grid, u_hat)
    flux = model.flux.value(jet[0]) + model.dispersive_flux(jet, eps)
    return -grid.symbol(1) * fft.fft(flux)


def linear_hat(model, grid, u_hat, eps):
    return model.linear_symbol_on(grid, eps) * u_hat


def rhs_hat(model, grid, u_hat, eps):
    return linear_hat(model, grid, u_hat, eps) + nonlinear_hat(model, grid, u_hat, eps)


def _prepare(u):
    u.require_valid()
    u_hat = to_spectral(u).coeffs
    report = resolution_ok(to_spectral(u), threshold=RESOLUTION_WARNING)
    flags = () if report.ok else ('unresolved',)
    if flags:
        logger.warning('rhs evaluated on an unresolved field (relative tail %.2e)',
                       report.relative_tail)
    return u_hat, flags


def rhs(model, u: RealField, eps) -> RealField:
    u_hat, flags = _prepare(u)
    values = fft.ifft(rhs_hat(model, u.grid, u_hat, eps)).real
    return RealField(u.grid, values, flags)


def rhs_nonlinear(model, u: RealField, eps) -> RealField:
    u_hat, flags = _prepare(u)
    values = fft.ifft(nonlinear_hat(model, u.grid, u_hat, eps)).real
    return RealField(u.grid, values, flags)


def rhs_linear(model, u: RealField, eps) -> RealField:
    u_hat, flags = _prepare(u)
    values = fft.ifft(linear_hat(model, u.grid, u_hat, eps)).real
    return RealField(u.grid, values, flags)


def invariants_cp(model, u_samples) -> InvariantTable:
    u = np.atleast_1d(np.asarray(u_samples, dtype=float))
    speed = model.a(u, 1)
    singular = np.flatnonzero(speed == 0)
    if singular.size:
        raise SingularInvariantError("a'(u) vanishes, invariants c and p are undefined",
                                     u=float(u[singular[0]]))
    return InvariantTable(u, np.broadcast_to(model.c(u), u.shape).copy(),
                          np.broadcast_to(model.p(u), u.shape).copy())
