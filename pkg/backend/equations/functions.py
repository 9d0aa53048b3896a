"""Scalar functions of u that carry their own analytic derivatives.

Model coefficients (a, c, p), Hamiltonian density coefficients and initial
data are all expressed with these objects so that every u-derivative used by
the numerics is exact. Sums, products, scalar multiples and reciprocals build
new functions whose derivatives follow from the usual rules.
"""
import numpy as np
from numpy.polynomial import Polynomial


class SmoothFunction:
    label = 'f'

    def value(self, u):
        raise NotImplementedError

    def _derivative(self):
        raise NotImplementedError

    def derivative(self, n=1):
        f = self
        for _ in range(n):
            cached = f.__dict__.get('_derivative_cache')
            if cached is None:
                cached = f._derivative()
                f.__dict__['_derivative_cache'] = cached
            f = cached
        return f

    def __call__(self, u, order=0):
        u = np.asarray(u, dtype=float)
        return self.derivative(order).value(u)

    @property
    def is_zero(self):
        return False

    def reciprocal(self):
        return Reciprocal(self)

    def __add__(self, other):
        other = as_function(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        return Sum(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Scaled(-1.0, self)

    def __sub__(self, other):
        return self + (-as_function(other))

    def __rsub__(self, other):
        return as_function(other) + (-self)

    def __mul__(self, other):
        if np.isscalar(other):
            if other == 0 or self.is_zero:
                return Constant(0.0)
            return Scaled(float(other), self)
        if self.is_zero or other.is_zero:
            return Constant(0.0)
        if isinstance(other, Constant):
            return Scaled(other.c, self)
        if isinstance(self, Constant):
            return Scaled(self.c, other)
        return Product(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return as_function(other) * self.reciprocal()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError('only nonnegative integer powers are supported')
        result = Constant(1.0)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        return f'<{type(self).__name__} {self.label}>'


def as_function(obj):
    if isinstance(obj, SmoothFunction):
        return obj
    if np.isscalar(obj):
        return Constant(float(obj))
    raise TypeError(f'cannot interpret {obj!r} as a smooth function')


class Constant(SmoothFunction):
    def __init__(self, c):
        self.c = float(c)
        self.label = repr(self.c)

    @property
    def is_zero(self):
        return self.c == 0.0

    def value(self, u):
        return np.full(np.shape(u), self.c)

    def _derivative(self):
        return ZERO

    def reciprocal(self):
        return Constant(1.0 / self.c)


ZERO = Constant(0.0)


class PolynomialFunction(SmoothFunction):
    def __init__(self, coeffs, label=None):
        self.poly = coeffs if isinstance(coeffs, Polynomial) else Polynomial(coeffs)
        self.label = label or str(self.poly)

    @property
    def is_zero(self):
        return not np.any(self.poly.coef)

    def value(self, u):
        return self.poly(u)

    def _derivative(self):
        d = self.poly.deriv()
        if d.degree() == 0:
            return Constant(d.coef[0])
        return PolynomialFunction(d)


class Power(SmoothFunction):
    """coef * u**exponent for real exponents (u > 0 assumed)."""

    def __init__(self, coef, exponent):
        self.coef = float(coef)
        self.exponent = float(exponent)
        self.label = f'{self.coef}*u^{self.exponent}'

    def value(self, u):
        return self.coef * np.power(u, self.exponent)

    def _derivative(self):
        if self.exponent == 0:
            return ZERO
        return Power(self.coef * self.exponent, self.exponent - 1)


class Hyperbolic(SmoothFunction):
    """coef * sinh(u) or coef * cosh(u); derivatives alternate between the two."""

    def __init__(self, coef, kind='sinh'):
        self.coef = float(coef)
        self.kind = kind
        self.label = f'{self.coef}*{kind}(u)'

    def value(self, u):
        return self.coef * (np.sinh(u) if self.kind == 'sinh' else np.cosh(u))

    def _derivative(self):
        return Hyperbolic(self.coef, 'cosh' if self.kind == 'sinh' else 'sinh')


class Explicit(SmoothFunction):
    """A function given by an explicit tuple of callables f, f', f'', ..."""

    def __init__(self, derivatives, label='f'):
        self.derivatives = tuple(derivatives)
        self.label = label

    def value(self, u):
        return self.derivatives[0](u)

    def _derivative(self):
        if len(self.derivatives) < 2:
            raise ValueError(f'no further derivative supplied for {self.label}')
        return Explicit(self.derivatives[1:], label=f"{self.label}'")


class Sum(SmoothFunction):
    def __init__(self, f, g):
        self.f, self.g = f, g
        self.label = f'({f.label} + {g.label})'

    def value(self, u):
        return self.f.value(u) + self.g.value(u)

    def _derivative(self):
        return self.f.derivative() + self.g.derivative()


class Scaled(SmoothFunction):
    def __init__(self, c, f):
        if isinstance(f, Scaled):
            c, f = c * f.c, f.f
        self.c, self.f = float(c), f
        self.label = f'{self.c}*{f.label}'

    @property
    def is_zero(self):
        return self.c == 0.0 or self.f.is_zero

    def value(self, u):
        return self.c * self.f.value(u)

    def _derivative(self):
        return self.f.derivative() * self.c


class Product(SmoothFunction):
    def __init__(self, f, g):
        self.f, self.g = f, g
        self.label = f'{f.label}*{g.label}'

    def value(self, u):
        return self.f.value(u) * self.g.value(u)

    def _derivative(self):
        return self.f.derivative() * self.g + self.f * self.g.derivative()


class Reciprocal(SmoothFunction):
    def __init__(self, f):
        self.f = f
        self.label = f'1/{f.label}'

    def value(self, u):
        return 1.0 / self.f.value(u)

    def _derivative(self):
        return -(self.f.derivative() * self * self)


def polynomial(*coeffs):
    """Polynomial in u from ascending coefficients, as a SmoothFunction."""
    poly = Polynomial(coeffs)
    if poly.degree() <= 0:
        return Constant(poly.coef[0] if len(poly.coef) else 0.0)
    return PolynomialFunction(poly)


def monomial(coef, degree):
    return polynomial(*([0.0] * degree + [coef]))


class TanhPolynomial(SmoothFunction):
    """P(tanh u) for a polynomial P; d/du P(tanh u) = P'(tanh u) (1 - tanh^2 u)."""

    def __init__(self, coeffs, label=None):
        self.poly = coeffs if isinstance(coeffs, Polynomial) else Polynomial(coeffs)
        self.label = label or f'P(tanh u), P = {self.poly}'

    @property
    def is_zero(self):
        return not np.any(self.poly.coef)

    def value(self, u):
        return self.poly(np.tanh(u))

    def _derivative(self):
        return TanhPolynomial(self.poly.deriv() * Polynomial([1.0, 0.0, -1.0]),
                              label=f"{self.label}'")
