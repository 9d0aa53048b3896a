"""The fourth-order equation X = T U - (U^3/6 + U_X^2/24 + U U_XX/12 + U_XXXX/240).

Also its far-field expansion U ~ -(6X)^(1/3) - 2^(2/3) T/(3X)^(1/3) and the
root of the truncated cubic X = T U - U^3/6 used as the initial guess.
"""
import numpy as np
from scipy.interpolate import CubicHermiteSpline

CBRT4 = 2 ** (2 / 3)


def pi2_residual(U, U_X, U_XX, U_XXXX, X, T):
    return X - T * U + U ** 3 / 6 + U_X ** 2 / 24 + U * U_XX / 12 + U_XXXX / 240


def asymptotic(X, T):
    """Two-term expansion valid for |X| -> infinity at fixed T."""
    X = np.asarray(X, dtype=float)
    return -np.cbrt(6 * X) - CBRT4 * T / np.cbrt(3 * X)


def asymptotic_slope(X, T):
    X = np.asarray(X, dtype=float)
    return -2 / np.cbrt(6 * X) ** 2 + CBRT4 * T / np.cbrt(3 * X) ** 4


def _cardano(X, T):
    """Real root of U^3 - 6 T U + 6 X = 0 where it is unique, polished by Newton."""
    p, q = -6.0 * T, 6.0 * X
    root = np.sqrt(np.maximum(q ** 2 / 4 + p ** 3 / 27, 0.0))
    U = np.cbrt(-q / 2 + root) + np.cbrt(-q / 2 - root)
    for _ in range(3):
        slope = 3 * U ** 2 + p
        safe = np.abs(slope) > 1e-300
        U = np.where(safe, U - (U ** 3 + p * U + q) / np.where(safe, slope, 1.0), U)
    return U


def cubic_leading(X, T):
    """Root of X = T U - U^3/6 following the X -> +-infinity branches.

    For T > 0 the cubic has three roots when |X| < (2/3) T sqrt(2T); there the
    outer branches are joined by a monotone Hermite cubic, which passes
    through U = 0 at X = 0.
    """
    scalar = np.ndim(X) == 0
    X = np.atleast_1d(np.asarray(X, dtype=float))
    U = _cardano(X, T)
    if T > 0:
        edge = 2 / 3 * T * np.sqrt(2 * T)
        inside = np.abs(X) < edge
        if np.any(inside):
            top = 2 * np.sqrt(2 * T)
            bridge = CubicHermiteSpline([-edge, edge], [top, -top], [-1 / (3 * T)] * 2)
            U = np.where(inside, bridge(X), U)
    return float(U[0]) if scalar else U
