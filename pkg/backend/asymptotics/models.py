from dataclasses import dataclass, field

import numpy as np

from equations.functions import SmoothFunction


@dataclass(frozen=True)
class MultiscaleConstants:
    """Scales of the PI2 approximation u ~ u_c + alpha eps^(2/7) U(X, T) at one breakup.

    X = (x - x_c - a0 (t - t_c)) / (beta eps^(6/7)), T = (t - t_c) / (gamma eps^(4/7)).
    ``k`` is the strength -6 lim (x - x_c)/(u - u_c)^3 at t_c.
    """

    alpha: float
    beta: float
    gamma: float
    a0: float
    a0_prime: float
    b1: float
    k: float
    x_c: float
    t_c: float
    u_c: float

    def identity_defects(self):
        """Relative violation of the three seventh-power relations."""
        a1, b, k = self.a0_prime, self.b1, self.k
        expected = (12 * b / (a1 * k ** 2),
                    12 ** 3 * k * b ** 3 / a1 ** 3,
                    12 ** 2 * k ** 3 * b ** 2 / a1 ** 9)
        actual = (self.alpha ** 7, self.beta ** 7, self.gamma ** 7)
        return tuple(abs(x - e) / abs(e) for x, e in zip(actual, expected))

    def scaled(self, x, t, eps):
        x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
        X = (x - self.x_c - self.a0 * (t - self.t_c)) / (self.beta * eps ** (6 / 7))
        T = (t - self.t_c) / (self.gamma * eps ** (4 / 7))
        return X, T

    def as_dict(self):
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


@dataclass(frozen=True)
class QuasiTrivData:
    """Dispersionless background v, its corrected-data shift w and the jet of v on a window."""

    x: np.ndarray = field(repr=False)
    t: float
    eps: float
    c: SmoothFunction = field(repr=False)
    v: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    jet: tuple = field(repr=False)

    @property
    def corrected(self):
        return self.v + self.eps ** 2 * self.w
