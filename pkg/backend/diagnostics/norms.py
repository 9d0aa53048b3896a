import numpy as np

from breakup.exceptions import EmptyWindowError, InvalidFieldError
from .models import LinfHistory

GROWTH_WINDOW = 5


def windowed_sup_diff(f, g, window):
    """max |f - g| over the grid nodes inside [x_lo, x_hi]."""
    if f.grid != g.grid:
        raise InvalidFieldError('Fields live on different grids')
    lo, hi = window
    nodes = f.grid.nodes
    inside = (nodes >= lo) & (nodes <= hi)
    if not np.any(inside):
        raise EmptyWindowError('No grid node inside the window', window=(float(lo), float(hi)))
    return float(np.max(np.abs(f.values[inside] - g.values[inside])))


def monotone_growth(values, window=GROWTH_WINDOW):
    values = np.asarray(values, dtype=float)
    if values.size < window:
        return False
    return bool(np.all(np.diff(values[-window:]) > 0))


def linf_history(record, window=GROWTH_WINDOW) -> LinfHistory:
    times = np.array([t for t, _ in record.snapshots], dtype=float)
    values = np.array([u.sup_norm() for _, u in record.snapshots], dtype=float)
    return LinfHistory(times, values, monotone_growth(values, window))
