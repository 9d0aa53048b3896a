from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from .equation import asymptotic, asymptotic_slope

ASYMMETRY_RATIO = 10.0


@dataclass(frozen=True)
class PI2Solution:
    """Smooth solution U(X; T) on [-x_max, x_max].

    ``derivatives`` holds (U, U_X, U_XX, U_XXX) on ``X``; ``interpolant`` is the
    C1 cubic the boundary-value solver returns for those four components.
    ``tail_remainders`` are U - asymptotic(X) at X = -x_max/2 and +x_max/2.
    """

    T: float
    X: np.ndarray
    derivatives: np.ndarray = field(repr=False)
    residual: float
    iterations: int
    x_max: float
    nodes: int
    tail_remainders: Tuple[float, float] = (0.0, 0.0)
    trace: List[dict] = field(default_factory=list, repr=False)
    interpolant: Callable = field(default=None, repr=False, compare=False)

    @property
    def U(self):
        return self.derivatives[0]

    @property
    def asymmetric(self):
        small, large = sorted(abs(value) for value in self.tail_remainders)
        return large > ASYMMETRY_RATIO * max(small, 1e-15)

    def __call__(self, X, order=0):
        """U (or one of its first three derivatives); asymptotic formula beyond x_max."""
        X = np.asarray(X, dtype=float)
        inside = np.abs(X) <= self.x_max
        values = np.empty(X.shape)
        if np.any(inside):
            values[inside] = self.interpolant(X[inside])[order]
        if np.any(~inside):
            if order > 1:
                raise ValueError('Only U and U_X extend beyond the solved domain')
            far = X[~inside]
            values[~inside] = asymptotic(far, self.T) if order == 0 else asymptotic_slope(far, self.T)
        return float(values) if values.ndim == 0 else values


@dataclass(frozen=True)
class PI2Table:
    """U sampled on a common X grid at several T, with its spline in (X, T).

    ``values`` has one column per entry of ``T_values``. With a single T the
    spline is a cubic in X alone. Beyond x_max the table falls back to the
    two-term far-field expansion. ``held_out`` pairs each interval midpoint with
    the sup difference between the spline and a direct solve there.
    """

    T_values: Tuple[float, ...]
    X: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    residuals: Tuple[float, ...]
    x_max: float
    nodes: int
    spline: Callable = field(repr=False, compare=False)
    solutions: Dict[float, PI2Solution] = field(default_factory=dict, repr=False, compare=False)
    held_out: Tuple[Tuple[float, float], ...] = ()

    @property
    def interpolation_error(self):
        """Largest sup difference between the spline and a direct solve at a held-out T."""
        return max((error for _, error in self.held_out), default=0.0)

    @property
    def T_range(self):
        return min(self.T_values), max(self.T_values)

    def covers(self, T):
        lo, hi = self.T_range
        T = np.asarray(T, dtype=float)
        return (T >= lo - 1e-12) & (T <= hi + 1e-12)

    def __call__(self, X, T):
        X, T = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(T, dtype=float))
        values = np.empty(X.shape)
        inside = np.abs(X) <= self.x_max
        if np.any(inside):
            if len(self.T_values) == 1:
                values[inside] = self.spline(X[inside])
            else:
                values[inside] = self.spline(X[inside], T[inside], grid=False)
        if np.any(~inside):
            values[~inside] = asymptotic(X[~inside], T[~inside])
        return float(values) if values.ndim == 0 else values
