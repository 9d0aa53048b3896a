from typing import NamedTuple

import numpy as np


class FitResult(NamedTuple):
    """Least-squares line through (log10 x, log10 y) with its quality figures."""

    slope: float
    intercept: float
    r: float
    sigma: float
    count: int

    def as_dict(self):
        return self._asdict()

    def __str__(self):
        return f'slope={self.slope:.4f} r={self.r:.5f} sigma={self.sigma:.4f} (n={self.count})'


class DecayFit(NamedTuple):
    """log|v_k| ~ log C - (mu + 1) log k - delta k on the fitted band."""

    mu: float
    delta: float
    log_c: float
    residual: float
    k_range: tuple
    multiple_singularities: bool


class LinfHistory(NamedTuple):
    times: np.ndarray
    values: np.ndarray
    growing: bool
