from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft

from breakup.exceptions import InvalidFieldError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on [-L, L) with N nodes.

    Coefficient arrays are stored in FFT order: index m holds wavenumber
    (pi/L)*m for m < N/2 and (pi/L)*(m - N) above, so the Nyquist mode
    -N/2 sits at index N/2.
    """

    half_width: float
    size: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise InvalidFieldError('Grid half-width must be positive', half_width=self.half_width)
        if self.size < 16 or self.size % 2:
            raise InvalidFieldError('Grid size must be an even integer >= 16', size=self.size)

    @property
    def spacing(self):
        return 2 * self.half_width / self.size

    @property
    def nyquist_index(self):
        return self.size // 2

    @cached_property
    def nodes(self):
        nodes = -self.half_width + self.spacing * np.arange(self.size)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def wavenumbers(self):
        k = (np.pi / self.half_width) * fft.fftfreq(self.size, d=1.0 / self.size)
        k.setflags(write=False)
        return k

    def symbol(self, order):
        """(i k)^m with the Nyquist entry zeroed for odd m."""
        s = (1j * self.wavenumbers) ** order
        if order % 2:
            s[self.nyquist_index] = 0.0
        return s

    def field(self, values):
        return RealField(self, np.asarray(values, dtype=float))

    def sample(self, func):
        return self.field(func(self.nodes))


@dataclass(frozen=True)
class RealField:
    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)
    flags: tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise InvalidFieldError('Field length does not match grid size',
                                    expected=self.grid.size, got=values.shape)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def valid(self):
        return bool(np.all(np.isfinite(self.values)))

    def require_valid(self):
        if not self.valid:
            bad = int(np.count_nonzero(~np.isfinite(self.values)))
            raise InvalidFieldError('Field contains non-finite values', count=bad)
        return self

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def integral(self):
        return float(np.sum(self.values) * self.grid.spacing)


@dataclass(frozen=True)
class SpectralCoeffs:
    grid: PeriodicGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.shape != (self.grid.size,):
            raise InvalidFieldError('Coefficient length does not match grid size',
                                    expected=self.grid.size, got=coeffs.shape)
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    def hermitian_defect(self):
        """Relative violation of c(-m) = conj(c(m))."""
        c = self.coeffs
        mirrored = np.conj(np.roll(c[::-1], 1))
        scale = np.max(np.abs(c))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(c - mirrored)) / scale)

    def is_hermitian(self, tol=1e-12):
        return self.hermitian_defect() <= tol

    def parseval_sum(self):
        """(2L/N^2) * sum |c_m|^2, equal to the grid quadrature of u^2."""
        grid = self.grid
        return float(2 * grid.half_width / grid.size ** 2 * np.sum(np.abs(self.coeffs) ** 2))
