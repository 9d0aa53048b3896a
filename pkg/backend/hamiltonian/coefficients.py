import logging
from typing import Dict, NamedTuple

import numpy as np

from equations.functions import ZERO, as_function

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


class CoefficientReport(NamedTuple):
    """Max pointwise violation of every constraint on b_0 ... b_10.

    ``b10_printed`` is b_10 = b_9'/4; ``b10`` is the Helmholtz form
    b_10 = (b_9' - b_6''')/4, which reduces to the printed one whenever b_6 is
    at most quadratic. ``passed`` is judged on the Helmholtz form.
    """

    violations: Dict[str, float]
    tolerance: float

    @property
    def passed(self):
        return all(value <= self.tolerance for key, value in self.violations.items()
                   if key != 'b10_printed')

    @property
    def worst(self):
        return max(self.violations.items(), key=lambda item: item[1])


def _relations(b):
    return {
        'b0': (b[0], ZERO),
        'b2': (b[2], 0.5 * b[1].derivative()),
        'b3': (b[3], ZERO),
        'b5': (b[5], b[4].derivative() * (1.0 / 3)),
        'b7': (b[7], 2.0 * b[6].derivative()),
        'b8': (b[8], 1.5 * b[6].derivative()),
        'b10': (b[10], 0.25 * (b[9].derivative() - b[6].derivative(3))),
        'b10_printed': (b[10], 0.25 * b[9].derivative()),
    }


def check_coefficients(b, u_samples, tolerance=DEFAULT_TOLERANCE) -> CoefficientReport:
    """Check the conditions under which the eps-expanded flux form is Hamiltonian.

    ``b`` maps the index m to b_m (a SmoothFunction or scalar); missing entries
    are zero. Report-style: nothing is raised for a violated relation.
    """
    b = {m: as_function(b.get(m, 0.0)) for m in range(11)}
    u = np.asarray(u_samples, dtype=float)
    violations = {}
    for name, (actual, required) in _relations(b).items():
        diff = np.broadcast_to(actual(u) - required(u), u.shape)
        violations[name] = float(np.max(np.abs(diff))) if diff.size else 0.0
    report = CoefficientReport(violations, tolerance)
    if not report.passed:
        logger.info('Coefficient relations violated, worst %s = %.3e', *report.worst)
    elif violations['b10_printed'] > tolerance:
        logger.info('b10 = b9\'/4 fails (%.3e) while the Helmholtz form holds',
                    violations['b10_printed'])
    return report


def check_model(model, u_samples, tolerance=DEFAULT_TOLERANCE) -> CoefficientReport:
    return check_coefficients(dict(model.template), u_samples, tolerance)
