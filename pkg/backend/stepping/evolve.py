import logging
import math

import numpy as np

from breakup.exceptions import BlowupSuspectedError, InvalidFieldError, NonConvergenceError
from spectral.transforms import dealias as two_thirds_filter, resolution_ok
from .energy import energy, mass
from .etdrk4 import etdrk4_step
from .gauss import gauss_irk4_step
from .models import EnergyRecord, Monitors, RunRecord, RunStatus, StepperState

logger = logging.getLogger(__name__)

ETDRK4 = 'etdrk4'
GAUSS_IRK4 = 'gauss-irk4'

STEPPERS = {
    ETDRK4: etdrk4_step,
    GAUSS_IRK4: gauss_irk4_step,
}


def integrator_for(model):
    return ETDRK4 if model.has_stiff_linear_part else GAUSS_IRK4


class _Stop(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.status = status
        self.message = message


class _Observer:
    """Fills the histories of a RunRecord and enforces the abort thresholds."""

    def __init__(self, record: RunRecord, model, eps, monitors: Monitors):
        self.record = record
        self.model = model
        self.eps = eps
        self.monitors = monitors
        self.e0 = None
        self.warned = False

    def observe(self, state: StepperState):
        u = state.field()
        t = state.t
        report = resolution_ok(state.u_hat, threshold=self.monitors.resolution_error)
        linf = u.sup_norm() if u.valid else math.inf
        self.record.linf.append((t, linf))
        self.record.tails.append((t, report.relative_tail))

        if not math.isfinite(linf) or linf > self.monitors.blowup_linf \
                or report.relative_tail > self.monitors.blowup_tail:
            raise _Stop(RunStatus.BLOWUP_SUSPECTED,
                        f'blowup suspected at t={t:.6g} (sup {linf:.3e}, tail {report.relative_tail:.3e})')
        if not report.ok:
            raise _Stop(RunStatus.RESOLUTION_EXHAUSTED,
                        f'resolution exhausted at t={t:.6g} (tail {report.relative_tail:.3e})')
        if report.relative_tail > self.monitors.resolution_warning and not self.warned:
            self.warned = True
            logger.warning('%s: spectral tail %.2e above warning level at t=%.4g',
                           self.model.name, report.relative_tail, t)

        value = energy(self.model, u, self.eps)
        if self.e0 is None:
            self.e0 = value
        drift = abs(value - self.e0) / abs(self.e0) if self.e0 else abs(value - self.e0)
        self.record.energy.append(EnergyRecord(t, value, drift))
        self.record.mass.append((t, mass(u)))
        return u


def _time_targets(snapshot_times, t_end):
    times = sorted({float(t) for t in snapshot_times if 0 <= t <= t_end} | {float(t_end)})
    return [t for t in times if t > 0]


def evolve(model, u0, eps, t_end, dt, snapshot_times=(), monitors=None, integrator=None,
           stepper_options=None, dealias=False) -> RunRecord:
    """Integrate u_t = rhs(u) from t = 0 to t_end with a fixed step.

    Every snapshot time is hit exactly by shortening the step that would
    overshoot it. The record always holds the initial and final snapshot; on
    blowup or resolution loss it holds everything up to the last good state.
    With ``dealias`` the two-thirds filter is applied after every step.
    """
    if t_end < 0 or dt <= 0:
        raise InvalidFieldError('Need t_end >= 0 and dt > 0', t_end=t_end, dt=dt)
    monitors = monitors or Monitors()
    integrator = integrator or integrator_for(model)
    step = STEPPERS[integrator]
    options = dict(stepper_options or {})

    record = RunRecord(model_name=model.name, eps=float(eps), dt=float(dt),
                       integrator=integrator, grid=u0.grid)
    observer = _Observer(record, model, eps, monitors)
    state = StepperState.start(u0)
    initial = resolution_ok(state.u_hat, threshold=monitors.resolution_error)
    if not initial.ok:
        raise InvalidFieldError('Initial data is not resolved on this grid',
                                relative_tail=initial.relative_tail, size=u0.grid.size)
    record.snapshots.append((0.0, observer.observe(state)))
    logger.info('Evolving %s with %s: eps=%g, dt=%g, t_end=%g, N=%d',
                model.name, integrator, eps, dt, t_end, u0.grid.size)

    try:
        for target in _time_targets(snapshot_times, t_end):
            while target - state.t > 1e-12 * max(1.0, target):
                h = min(dt, target - state.t)
                if target - state.t - h <= 1e-12 * max(1.0, target):
                    h = target - state.t
                try:
                    state = step(state, h, model, eps, **options)
                except BlowupSuspectedError as exc:
                    raise _Stop(RunStatus.BLOWUP_SUSPECTED, str(exc)) from exc
                except NonConvergenceError as exc:
                    raise _Stop(RunStatus.BLOWUP_SUSPECTED,
                                f'stage solver failed at t={state.t:.6g}: {exc}') from exc
                if dealias:
                    state = StepperState(state.t, two_thirds_filter(state.u_hat), state.cache)
                record.steps += 1
                if record.steps % monitors.every == 0:
                    observer.observe(state)
            state = StepperState(target, state.u_hat, state.cache)
            record.snapshots.append((target, observer.observe(state)))
    except _Stop as stop:
        record.status = stop.status
        record.message = stop.message
        if record.snapshots[-1][0] < state.t and np.all(np.isfinite(state.u_hat.coeffs)):
            record.snapshots.append((state.t, state.field()))
        logger.warning('%s: %s', model.name, stop.message)

    _flag_drifts(record, monitors)
    logger.info('%s finished after %d steps: %s', model.name, record.steps, record.status.value)
    return record


def _flag_drifts(record: RunRecord, monitors: Monitors):
    if record.max_energy_drift > monitors.energy_tolerance:
        record.flags.append('energy-drift')
        logger.warning('%s: relative energy drift %.2e exceeds %.0e',
                       record.model_name, record.max_energy_drift, monitors.energy_tolerance)
    if record.max_mass_drift > monitors.mass_tolerance:
        record.flags.append('mass-drift')
        logger.warning('%s: relative mass drift %.2e exceeds %.0e',
                       record.model_name, record.max_mass_drift, monitors.mass_tolerance)
