import logging

import numpy as np
from scipy import stats

from breakup.exceptions import FitError
from .models import DecayFit, FitResult

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-13
SKIP_MODES = 8
OSCILLATION_THRESHOLD = 0.1


def loglog_fit(x, y) -> FitResult:
    """Ordinary least squares of log10(y) against log10(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise FitError('Abscissae and values differ in length', x=x.size, y=y.size)
    for name, values in (('x', x), ('y', y)):
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            raise FitError(f'Nonpositive {name} value cannot be fitted on a log scale',
                           index=int(bad[0]), value=float(values[bad[0]]))
    if x.size < 3:
        raise FitError('A log-log fit needs at least 3 points', count=int(x.size))
    result = stats.linregress(np.log10(x), np.log10(y))
    fit = FitResult(float(result.slope), float(result.intercept), float(result.rvalue),
                    float(result.stderr), int(x.size))
    logger.info('log-log fit: %s', fit)
    return fit


def fourier_decay_fit(c, k_range=None, noise_floor=NOISE_FLOOR, skip_modes=SKIP_MODES,
                      oscillation_threshold=OSCILLATION_THRESHOLD) -> DecayFit:
    """Fit log|v_k| = log C - (mu + 1) log k - delta k over positive wavenumbers.

    The band starts above the lowest ``skip_modes`` modes and stops at the
    first coefficient under ``noise_floor`` times the largest modulus. A large
    log-residual means the spectrum oscillates, i.e. several singularities
    compete at comparable distance from the real axis.
    """
    grid = c.grid
    half = grid.size // 2
    modulus = np.abs(c.coeffs[1:half])
    k = grid.wavenumbers[1:half]
    scale = np.max(np.abs(c.coeffs))
    if scale == 0:
        raise FitError('All Fourier coefficients vanish')
    band = np.arange(modulus.size) >= skip_modes
    below = np.flatnonzero(modulus <= noise_floor * scale)
    if below.size:
        band &= np.arange(modulus.size) < below[0]
    if k_range is not None:
        band &= (k >= k_range[0]) & (k <= k_range[1])
    if np.count_nonzero(band) < 4:
        raise FitError('Too few resolved modes for a decay fit', modes=int(np.count_nonzero(band)))

    kb = k[band]
    design = np.column_stack([np.ones_like(kb), -np.log(kb), -kb])
    target = np.log(modulus[band])
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    log_c, exponent, delta = solution
    residual = float(np.sqrt(np.mean((design @ solution - target) ** 2)))
    fit = DecayFit(mu=float(exponent - 1), delta=float(delta), log_c=float(log_c),
                   residual=residual, k_range=(float(kb[0]), float(kb[-1])),
                   multiple_singularities=residual > oscillation_threshold)
    logger.debug('Fourier decay fit mu=%.4f delta=%.4f residual=%.2e', fit.mu, fit.delta, residual)
    return fit
