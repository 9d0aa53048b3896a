import numpy as np

from equations.functions import Explicit, TanhPolynomial
from .models import InitialData, InverseBranch


def _right(u):
    return np.log((1 + np.sqrt(1 - u)) / np.sqrt(u))


def _right_1(u):
    return -0.5 / (u * np.sqrt(1 - u))


def _right_2(u):
    w = 1 - u
    return 0.5 * u ** -2 * w ** -0.5 - 0.25 * u ** -1 * w ** -1.5


def _right_3(u):
    w = 1 - u
    return -u ** -3 * w ** -0.5 + 0.5 * u ** -2 * w ** -1.5 - 0.375 * u ** -1 * w ** -2.5


def _negated(func):
    return lambda u: -func(u)


def sech2_data() -> InitialData:
    """u(x, 0) = sech^2 x, inverted as x = +-ln((1 + sqrt(1 - u))/sqrt(u))."""
    right = Explicit((_right, _right_1, _right_2, _right_3), label='Phi+')
    left = Explicit(tuple(_negated(f) for f in (_right, _right_1, _right_2, _right_3)),
                    label='Phi-')
    branches = {
        'right': InverseBranch('right', right, (0.0, 1.0), (0.0, np.inf)),
        'left': InverseBranch('left', left, (0.0, 1.0), (-np.inf, 0.0)),
    }
    phi = TanhPolynomial([1.0, 0.0, -1.0], label='sech^2')
    return InitialData('sech2', phi, branches, breakup_branch='right', value_range=(0.0, 1.0))


INITIAL_DATA = {
    'sech2': sech2_data,
}


def initial_data(name='sech2') -> InitialData:
    return INITIAL_DATA[name]()
