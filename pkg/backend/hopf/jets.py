"""x-derivatives of the dispersionless solution to any order.

Around a foot point xi0 the characteristic map x(xi) = xi + t a(phi(xi)) and
the profile phi are expanded in powers of s = xi - xi0. Reverting the first
series gives s as a power series in h = x - x0, and composing phi with it
gives v(x0 + h). Truncated series are arrays of shape (order + 1, points).
"""
import math

import numpy as np

from breakup.exceptions import NearCausticError
from .characteristics import CAUSTIC_TOL, HOPF_TOL, foot_points


def series_mul(A, B):
    C = np.zeros_like(A)
    n = A.shape[0]
    for i in range(n):
        C[i:] += A[i] * B[:n - i]
    return C


def taylor(func, x0, order):
    """f^(k)(x0)/k! for k = 0..order."""
    return np.array([func(x0, k) / math.factorial(k) for k in range(order + 1)])


def compose(outer, inner):
    """Series of f(g(s)) from the Taylor coefficients of f at g(0) and the series of g."""
    delta = inner.copy()
    delta[0] = 0.0
    result = np.zeros_like(inner)
    result[0] = outer[-1]
    for coefficient in outer[-2::-1]:
        result = series_mul(result, delta)
        result[0] += coefficient
    return result


def revert(series):
    """S with S(0) = 0 and sum_j series[j] S^j = h, given series[1] != 0."""
    S = np.zeros_like(series)
    S[1] = 1.0 / series[1]
    shifted = series.copy()
    shifted[0] = 0.0
    for k in range(2, series.shape[0]):
        S[k] = -compose(shifted, S)[k] / series[1]
    return S


def hopf_jet(a, data, x, t, order=6, tol=HOPF_TOL, caustic_tol=CAUSTIC_TOL):
    """(v, v_x, ..., d^order v/dx^order) of the dispersionless solution at x."""
    scalar = np.ndim(x) == 0
    xi = foot_points(a, data, x, t, tol)
    profile = taylor(data, xi, order)
    characteristic = t * compose(taylor(a, profile[0], order), profile)
    characteristic[1] += 1.0
    if np.any(np.abs(characteristic[1]) < caustic_tol):
        where = int(np.argmin(np.abs(characteristic[1])))
        raise NearCausticError('Characteristic Jacobian vanishes',
                               x=float(np.atleast_1d(x)[where]), t=t)
    jet = compose(profile, revert(characteristic))
    jet *= np.array([math.factorial(k) for k in range(order + 1)], dtype=float)[:, None]
    return jet[:, 0] if scalar else jet


def series_derivative(series, n=1):
    """Series of d^n/dh^n; the top n coefficients are lost to truncation."""
    result = series
    for _ in range(n):
        shifted = np.zeros_like(result)
        shifted[:-1] = result[1:] * np.arange(1, result.shape[0])[:, None]
        result = shifted
    return result


def series_reciprocal(series):
    result = np.zeros_like(series)
    result[0] = 1.0 / series[0]
    for k in range(1, series.shape[0]):
        result[k] = -np.sum(series[1:k + 1] * result[k - 1::-1], axis=0) / series[0]
    return result
