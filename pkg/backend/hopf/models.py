from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from equations.functions import SmoothFunction

STRENGTH_AGREEMENT = 1e-6


@dataclass(frozen=True)
class InverseBranch:
    """One monotone piece of the initial profile, inverted: x = Phi(u) on u_range."""

    name: str
    inverse: SmoothFunction
    u_range: Tuple[float, float]
    x_range: Tuple[float, float]

    def __call__(self, u, order=0):
        return self.inverse(u, order)

    def contains(self, u):
        lo, hi = self.u_range
        u = np.asarray(u, dtype=float)
        return (u > lo) & (u < hi)


@dataclass(frozen=True)
class InitialData:
    """Initial profile phi(x) with analytic derivatives up to order 3 and its inverse branches."""

    name: str
    phi: SmoothFunction
    branches: Dict[str, InverseBranch] = field(repr=False)
    breakup_branch: str
    value_range: Tuple[float, float]

    def __call__(self, x, order=0):
        return self.phi(x, order)

    def branch(self, name=None) -> InverseBranch:
        return self.branches[name or self.breakup_branch]


@dataclass(frozen=True)
class CriticalPoint:
    """Point of gradient catastrophe of the dispersionless solution.

    ``k`` is -(a''' t_c + Phi''')/6. ``k_limit`` = 6k is the value of
    -6 lim (x - x_c)/(u(x, t_c) - u_c)^3 that formula implies, and
    ``k_estimate`` is that limit measured from extrapolated difference
    quotients along the branch.
    """

    x_c: float
    t_c: float
    u_c: float
    k: float
    k_limit: float
    k_estimate: float
    residuals: Tuple[float, float, float]
    branch: str = ''

    @property
    def disagreement(self):
        return abs(self.k_estimate - self.k_limit) > STRENGTH_AGREEMENT * abs(self.k_limit)

    def as_dict(self):
        return {
            'x_c': self.x_c, 't_c': self.t_c, 'u_c': self.u_c, 'k': self.k,
            'k_limit': self.k_limit, 'k_estimate': self.k_estimate,
            'branch': self.branch,
        }
