import logging
from typing import NamedTuple

import numpy as np
from scipy import fft

from breakup.exceptions import InvalidFieldError
from .models import RealField, SpectralCoeffs

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 6


class ResolutionReport(NamedTuple):
    ok: bool
    tail_max: float
    relative_tail: float


def to_spectral(f: RealField) -> SpectralCoeffs:
    f.require_valid()
    return SpectralCoeffs(f.grid, fft.fft(f.values))


def to_physical(c: SpectralCoeffs) -> RealField:
    return RealField(c.grid, fft.ifft(c.coeffs).real)


def differentiate_hat(grid, u_hat, order):
    """Spectral m-th derivative of FFT-ordered coefficients, returned in physical space."""
    if order == 0:
        return fft.ifft(u_hat).real
    return fft.ifft(grid.symbol(order) * u_hat).real


def differentiate(grid, values, order):
    return differentiate_hat(grid, fft.fft(values), order)


def derivative(f: RealField, order: int) -> RealField:
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise InvalidFieldError('Derivative order out of range', order=order,
                                maximum=MAX_DERIVATIVE_ORDER)
    f.require_valid()
    return RealField(f.grid, differentiate(f.grid, f.values, order))


def resolution_ok(c: SpectralCoeffs, tail_fraction=0.1, threshold=1e-8) -> ResolutionReport:
    if not 0 < tail_fraction < 1:
        raise ValueError('tail_fraction must lie in (0, 1)')
    if threshold <= 0:
        raise ValueError('threshold must be positive')
    moduli = np.abs(c.coeffs)
    peak = float(moduli.max())
    if peak == 0:
        return ResolutionReport(True, 0.0, 0.0)
    k = np.abs(c.grid.wavenumbers)
    tail = k >= (1 - tail_fraction) * k.max()
    tail_max = float(moduli[tail].max())
    relative = tail_max / peak
    return ResolutionReport(relative <= threshold, tail_max, relative)


def dealias(c: SpectralCoeffs) -> SpectralCoeffs:
    """Two-thirds rule: zero every mode with |m| > N/3."""
    m = np.abs(np.rint(c.grid.wavenumbers * c.grid.half_width / np.pi))
    coeffs = np.where(m > c.grid.size / 3, 0.0, c.coeffs)
    return SpectralCoeffs(c.grid, coeffs)


class SpectralJet:
    """Lazily evaluated x-derivatives of one field, shared by flux and density code."""

    def __init__(self, grid, u_hat):
        self.grid = grid
        self.u_hat = u_hat
        self._cache = {}

    @classmethod
    def from_values(cls, grid, values):
        return cls(grid, fft.fft(values))

    def __getitem__(self, order):
        if order not in self._cache:
            self._cache[order] = differentiate_hat(self.grid, self.u_hat, order)
        return self._cache[order]

    def derivative_of(self, values, order=1):
        """Spectral derivative of an arbitrary grid function on the same grid."""
        return differentiate(self.grid, values, order)
