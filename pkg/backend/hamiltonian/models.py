from dataclasses import dataclass
from typing import Tuple

import numpy as np

from equations.functions import SmoothFunction, as_function

JET_VARIABLES = ('u', 'u_x', 'u_xx', 'u_xxx')


@dataclass(frozen=True)
class DensityTerm:
    """coefficient(u) * eps**eps_power * u_x**i * u_xx**j * u_xxx**k."""

    coefficient: SmoothFunction
    powers: Tuple[int, int, int] = (0, 0, 0)
    eps_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'coefficient', as_function(self.coefficient))
        object.__setattr__(self, 'powers', tuple(int(p) for p in self.powers))

    @property
    def jet_order(self):
        orders = [i + 1 for i, p in enumerate(self.powers) if p]
        return max(orders, default=0)

    def _monomial(self, jet, lowered=None):
        result = 1.0
        for index, power in enumerate(self.powers):
            if index == lowered:
                power -= 1
            if power:
                result = result * jet[index + 1] ** power
        return result

    def evaluate(self, jet, eps, variable=0):
        weight = eps ** self.eps_power
        u = jet[0]
        if variable == 0:
            return weight * self.coefficient.derivative().value(u) * self._monomial(jet)
        power = self.powers[variable - 1]
        if power == 0:
            return np.zeros_like(u)
        return weight * power * self.coefficient.value(u) * self._monomial(jet, variable - 1)

    def value(self, jet, eps):
        return eps ** self.eps_power * self.coefficient.value(jet[0]) * self._monomial(jet)


@dataclass(frozen=True)
class HamiltonianDensity:
    """Density h(u, eps u_x, eps^2 u_xx, eps^3 u_xxx) as a sum of jet monomials.

    Partial derivatives are analytic: the coefficient functions know their own
    u-derivatives and the monomial parts are differentiated by power rule.
    """

    terms: Tuple[DensityTerm, ...]
    tag: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(t for t in self.terms if not t.coefficient.is_zero))

    @property
    def jet_order(self):
        return max((t.jet_order for t in self.terms), default=0)

    @property
    def eps_powers(self):
        return sorted({t.eps_power for t in self.terms})

    def _jet(self, u, ux, uxx, uxxx):
        u = np.asarray(u, dtype=float)
        zero = np.zeros_like(u)
        return (u,
                zero if ux is None else ux,
                zero if uxx is None else uxx,
                zero if uxxx is None else uxxx)

    def h(self, u, ux=None, uxx=None, uxxx=None, eps=1.0):
        jet = self._jet(u, ux, uxx, uxxx)
        return sum((t.value(jet, eps) for t in self.terms), np.zeros_like(jet[0]))

    def partial(self, variable, u, ux=None, uxx=None, uxxx=None, eps=1.0):
        jet = self._jet(u, ux, uxx, uxxx)
        return sum((t.evaluate(jet, eps, variable) for t in self.terms), np.zeros_like(jet[0]))

    def dh_du(self, *jet, eps=1.0):
        return self.partial(0, *jet, eps=eps)

    def dh_dux(self, *jet, eps=1.0):
        return self.partial(1, *jet, eps=eps)

    def dh_duxx(self, *jet, eps=1.0):
        return self.partial(2, *jet, eps=eps)

    def dh_duxxx(self, *jet, eps=1.0):
        return self.partial(3, *jet, eps=eps)

    def order_part(self, eps_power):
        return HamiltonianDensity(tuple(t for t in self.terms if t.eps_power == eps_power),
                                  tag=f'{self.tag}[eps^{eps_power}]')

    def __add__(self, other):
        return HamiltonianDensity(self.terms + other.terms, tag=f'{self.tag}+{other.tag}')


@dataclass(frozen=True)
class Order6Extension:
    """Order-6 extension data: base invariants c, p, the free beta and the derived alpha."""

    c: SmoothFunction
    p: SmoothFunction
    beta: SmoothFunction
    alpha: SmoothFunction
