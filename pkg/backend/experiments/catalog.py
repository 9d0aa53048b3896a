"""Experiment catalog.

Each entry fills an ExperimentResult from a RunConfig: PDE runs go through a
worker pool (one process per run, results in submission order), the
dispersionless, PI2 and quasitriviality constructions are evaluated on the
same grid nodes, and error sweeps end in log-log fits. A LabError stops the
entry but keeps whatever it already attached to the result.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np
from django.conf import settings

from asymptotics.multiscale import (
    WINDOW_T, WINDOW_X, multiscale_constants, multiscale_eval, required_times,
)
from asymptotics.quasitriv import hopf_discrepancy, quasitriv_solution
from breakup.exceptions import (
    DegenerateDispersionError, FitError, LabError, ObstructionError, OutOfWindowError,
)
from diagnostics.fits import fourier_decay_fit, loglog_fit
from diagnostics.norms import linf_history, windowed_sup_diff
from equations.catalog import build_model
from equations.functions import polynomial
from hamiltonian.coefficients import check_model
from hamiltonian.densities import hf_density, order6_extension
from hamiltonian.scaling import (
    bracket_grid, minimum_slope, obstruction_demo, random_polynomial, random_test_fields,
)
from hamiltonian.variational import poisson_bracket
from hopf.characteristics import hopf_solve
from hopf.critical import critical_point_for_model
from hopf.data import initial_data
from pi2.tabulate import pi2_tabulate
from spectral.models import PeriodicGrid
from spectral.transforms import to_spectral
from stepping.evolve import evolve
from stepping.models import Monitors, RunStatus
from .models import ExperimentResult, Table

logger = logging.getLogger(__name__)

EXPERIMENTS = {}

BLOWUP_SNAPSHOTS = 32
DISCREPANCY_WINDOW = (0.8, 2.0)


def _lab(key):
    return lambda: settings.LAB[key]


# Values an entry uses when the configuration does not name them.
EXPERIMENT_DEFAULTS = {
    'breakup-universality': {},
    'scaling': {'eps': _lab('EPS_SWEEP'), 'orders': [1, 3, 4, 5]},
    'quasitriviality': {'model': 'kawahara', 'alpha': 1.0, 'beta': 1.0,
                        'window': [0.8, 2.0], 'eps': _lab('QUASITRIV_SWEEP')},
    'conservation-law': {'n': 5, 'eps': _lab('QUASITRIV_SWEEP')},
    'blowup': {'eps': [0.1], 't_end': 0.318, 'orders': [4, 5]},
    'kdv2-transition': {'model': 'kdv2', 'alphas': [0.5, 1.0, 1.2], 't_end': 0.04},
    'kawahara-zone': {'model': 'kawahara', 'alpha': 1.0, 'beta': -1.0, 't_end': 0.25},
    'nonlinear-dispersion': {'model': 'nonlinear-dispersion', 'c': [0.0, 0.0, 1.0],
                             'eps': [0.1], 'size': 2048},
    'hamiltonian-checks': {},
    'obstruction': {'p': [0.0, 0.0, 1.0]},
    'evolve': {},
    'hopf': {},
    'pi2': {'t_grid': _lab('PI2_T_GRID')},
}


def experiment(name):
    def register(func):
        EXPERIMENTS[name] = func
        return func
    return register


def run_experiment(config) -> ExperimentResult:
    """Run the catalog entry named by ``config.experiment``.

    Module errors are recorded in the result (status ``partial``) and never
    propagate; the runs and tables produced before the error are kept.
    """
    result = ExperimentResult(config.experiment, config)
    runner = EXPERIMENTS[config.experiment]
    logger.info('Experiment %s started (model %s, %d eps value(s), N=%d)',
                config.experiment, config.model, len(config.eps), config.size)
    try:
        runner(config, result)
    except LabError as exc:
        result.mark_partial(f'{type(exc).__name__}: {exc}')
        result.metadata['error'] = type(exc).__name__
        logger.warning('Experiment %s stopped: %s', config.experiment, exc)
    logger.info('Experiment %s finished: %s', config.experiment, result.status)
    return result


def evolve_job(spec, eps, t_end, half_width, size, dt, snapshots=(), monitors=None, data='sech2',
               dealias=False):
    """One PDE run from the named initial profile; module level so worker processes can run it."""
    kind, params = spec
    model = build_model(kind, **params)
    grid = PeriodicGrid(half_width, size)
    return evolve(model, grid.sample(initial_data(data)), eps, t_end, dt,
                  snapshot_times=snapshots, monitors=monitors, dealias=dealias)


def fan_out(job, *columns, workers=1):
    """job applied row-wise over the columns, in order; a process pool when workers > 1."""
    rows = len(columns[0]) if columns else 0
    if workers > 1 and rows > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, *columns))
    return [job(*row) for row in zip(*columns)]


def _label(value):
    return f'{value:.6g}'


def _run_all(config, result, specs, eps_list, t_ends, labels, snapshots=()):
    """Run every (spec, eps, t_end) row and attach the records; returns [(label, record)]."""
    job = partial(evolve_job, half_width=config.half_width, size=config.size, dt=config.dt,
                  snapshots=tuple(snapshots), monitors=Monitors.from_settings(settings.LAB),
                  data=settings.LAB['DATA'], dealias=config.dealias)
    records = fan_out(job, list(specs), list(eps_list), list(t_ends), workers=config.workers)
    for label, record in zip(labels, records):
        result.records[label] = record
        if record.status != RunStatus.COMPLETED:
            result.mark_partial(f'{label}: {record.message}')
        if record.flags:
            logger.warning('Run %s flagged: %s', label, ', '.join(record.flags))
    return list(zip(labels, records))


def _sweep(config, result, spec, eps_list, t_end, prefix='', snapshots=()):
    labels = [f'{prefix}eps_{_label(eps)}' for eps in eps_list]
    pairs = _run_all(config, result, [spec] * len(eps_list), eps_list,
                     [t_end] * len(eps_list), labels, snapshots)
    return [(eps, record) for eps, (_, record) in zip(eps_list, pairs)]


def _completed(pairs):
    return [(key, record) for key, record in pairs if record.status == RunStatus.COMPLETED]


def _models_for(config):
    """(label, spec) per model: one per order for GenKdV with ``orders``, else the configured one."""
    if config.model == 'genkdv' and config.orders:
        return [(f'n{n}_', ('genkdv', {'n': int(n)})) for n in config.orders]
    return [('', config.model_spec())]


def _store(result, prefix, values):
    for key, value in values.items():
        result.metadata[f'{prefix}_{key}'] = value


def _fit(result, name, eps, errors):
    try:
        result.fits[name] = loglog_fit(eps, errors)
    except FitError as exc:
        result.metadata[f'fit_{name}'] = f'unavailable: {exc.message}'


def _critical(result, model, data, prefix='critical'):
    point = critical_point_for_model(model, data)
    _store(result, prefix, point.as_dict())
    return point


def _tabulate(config, T_values):
    return pi2_tabulate(T_values, x_max=config.x_max, nodes=config.nodes,
                        tol=settings.LAB['PI2_TOL'], workers=config.workers,
                        interpolation_tol=settings.LAB['PI2_INTERPOLATION_TOL'])


def _window(config, grid):
    if config.window:
        return tuple(config.window)
    return (-grid.half_width, grid.half_width)


@experiment('evolve')
def evolve_runs(config, result):
    model = config.build_model()
    data = initial_data(settings.LAB['DATA'])
    t_end = config.t_end
    if t_end is None:
        t_end = _critical(result, model, data).t_c
    _sweep(config, result, config.model_spec(), config.eps, t_end, snapshots=config.snapshots)


@experiment('hopf')
def hopf_profile(config, result):
    model = config.build_model()
    data = initial_data(settings.LAB['DATA'])
    point = _critical(result, model, data)
    result.metadata['strength_disagreement'] = point.disagreement
    t = point.t_c if config.t_end is None else config.t_end
    grid = PeriodicGrid(config.half_width, config.size)
    lo, hi = _window(config, grid)
    x = grid.nodes[(grid.nodes >= lo) & (grid.nodes <= hi)]
    result.metadata['t'] = t
    result.tables['hopf'] = Table.from_columns(x=x, u_hopf=hopf_solve(model.a, data, x, t))


@experiment('pi2')
def pi2_table(config, result):
    table = _tabulate(config, config.t_grid)
    result.pi2_tables['table'] = table
    result.tables['pi2_solves'] = Table.from_columns(T=table.T_values, residual=table.residuals)
    result.metadata['max_residual'] = max(table.residuals)
    result.metadata['interpolation_error'] = table.interpolation_error
    if table.held_out:
        held_T, held_error = zip(*table.held_out)
        result.tables['pi2_held_out'] = Table.from_columns(T=held_T, sup_error=held_error)


@experiment('breakup-universality')
def breakup_universality(config, result):
    model = config.build_model()
    data = initial_data(settings.LAB['DATA'])
    point = _critical(result, model, data)
    t = point.t_c if config.t_end is None else config.t_end
    pairs = _sweep(config, result, config.model_spec(), config.eps, t)
    grid = PeriodicGrid(config.half_width, config.size)
    window_x, window_t = settings.LAB.get('WINDOW_X', WINDOW_X), settings.LAB.get('WINDOW_T', WINDOW_T)

    try:
        constants = multiscale_constants(model, point)
    except DegenerateDispersionError as exc:
        constants, table = None, None
        result.metadata['multiscale'] = f'unavailable: {exc.message}'
        logger.warning('%s: no multiscale approximation (%s)', model.name, exc.message)
    else:
        _store(result, 'constants', constants.as_dict())
        needed = sorted({round(float(required_times(constants, t, eps)[0]), 12)
                         for eps in config.eps})
        if max(abs(T) for T in needed) > window_t:
            raise OutOfWindowError('Requested time is outside the multiscale trust window',
                                   T=needed, window_t=window_t)
        table = _tabulate(config, needed)
        result.pi2_tables['table'] = table

    eps_done, hopf_errors, multiscale_errors = [], [], []
    for eps, record in _completed(pairs):
        if constants is not None:
            X, _ = constants.scaled(grid.nodes, t, eps)
            inside = np.abs(X) <= window_x
        else:
            lo, hi = config.window or (point.x_c - 0.5, point.x_c + 0.5)
            inside = (grid.nodes >= lo) & (grid.nodes <= hi)
        x = grid.nodes[inside]
        u = record.final.values[inside]
        columns = {'x': x, 'u_pde': u, 'u_hopf': hopf_solve(model.a, data, x, t)}
        eps_done.append(eps)
        hopf_errors.append(float(np.max(np.abs(u - columns['u_hopf']))))
        if constants is not None:
            columns['u_multiscale'] = multiscale_eval(x, t, eps, constants, table,
                                                      window_x, window_t)
            multiscale_errors.append(float(np.max(np.abs(u - columns['u_multiscale']))))
        result.tables[f'window_eps_{_label(eps)}'] = Table.from_columns(**columns)

    errors = {'eps': eps_done, 'err_hopf': hopf_errors}
    if constants is not None:
        errors['err_multiscale'] = multiscale_errors
    result.tables['errors'] = Table.from_columns(**errors)
    if multiscale_errors:
        result.metadata['error_ratio'] = multiscale_errors[0] / hopf_errors[0]
    if len(eps_done) >= 3:
        _fit(result, 'hopf', eps_done, hopf_errors)
        if constants is not None:
            _fit(result, 'multiscale', eps_done, multiscale_errors)


@experiment('scaling')
def breakup_scaling(config, result):
    """sup |u - u_hopf| over the window at t_c against eps, per model."""
    data = initial_data(settings.LAB['DATA'])
    grid = PeriodicGrid(config.half_width, config.size)
    window = _window(config, grid)
    for prefix, spec in _models_for(config):
        model = build_model(spec[0], **spec[1])
        point = _critical(result, model, data, prefix=f'{prefix}critical')
        pairs = _sweep(config, result, spec, config.eps, point.t_c, prefix=prefix)
        hopf = grid.field(hopf_solve(model.a, data, grid.nodes, point.t_c))
        done = _completed(pairs)
        eps = [value for value, _ in done]
        errors = [windowed_sup_diff(record.final, hopf, window) for _, record in done]
        name = prefix.rstrip('_') or 'errors'
        result.tables[name] = Table.from_columns(eps=eps, error=errors)
        _fit(result, name, eps, errors)


def _dispersionless_comparison(config, result, with_quasitriv):
    model = config.build_model()
    data = initial_data(settings.LAB['DATA'])
    point = _critical(result, model, data)
    t = point.t_c / 2 if config.t_end is None else config.t_end
    result.metadata['t'] = t
    grid = PeriodicGrid(config.half_width, config.size)
    lo, hi = _window(config, grid)
    inside = (grid.nodes >= lo) & (grid.nodes <= hi)
    x = grid.nodes[inside]
    hopf = hopf_solve(model.a, data, x, t)
    pairs = _sweep(config, result, config.model_spec(), config.eps, t)

    columns = {'eps': [], 'err_hopf': []}
    if with_quasitriv:
        columns['err_quasitriv'] = []
    for eps, record in _completed(pairs):
        u = record.final.values[inside]
        columns['eps'].append(eps)
        columns['err_hopf'].append(float(np.max(np.abs(u - hopf))))
        if with_quasitriv:
            corrected = quasitriv_solution(data, model, x, t, eps, t_c=point.t_c)
            columns['err_quasitriv'].append(float(np.max(np.abs(u - corrected))))
    result.tables['errors'] = Table.from_columns(**columns)
    _fit(result, 'hopf', columns['eps'], columns['err_hopf'])
    if with_quasitriv:
        _fit(result, 'quasitriv', columns['eps'], columns['err_quasitriv'])


@experiment('quasitriviality')
def quasitriviality(config, result):
    _dispersionless_comparison(config, result, with_quasitriv=True)


@experiment('conservation-law')
def conservation_law(config, result):
    _dispersionless_comparison(config, result, with_quasitriv=False)


@experiment('blowup')
def blowup(config, result):
    """sup-norm histories and Fourier strip widths of long GenKdV runs."""
    data = initial_data(settings.LAB['DATA'])
    eps = config.eps[0]
    t_end = config.t_end
    snapshots = config.snapshots or tuple(np.linspace(0.0, t_end, BLOWUP_SNAPSHOTS + 1)[1:])
    for prefix, spec in _models_for(config):
        model = build_model(spec[0], **spec[1])
        point = _critical(result, model, data, prefix=f'{prefix}critical')
        (_, record), = _sweep(config, result, spec, [eps], t_end, prefix=prefix,
                              snapshots=snapshots)
        history = linf_history(record)
        name = prefix.rstrip('_') or 'run'
        result.tables[f'{name}_linf'] = Table.from_columns(t=history.times, linf=history.values)
        result.metadata[f'{name}_linf_growing'] = history.growing

        rows = {'t': [], 'mu': [], 'delta': [], 'residual': [], 'multiple': []}
        for t, u in record.snapshots:
            if t < point.t_c:
                continue
            try:
                fit = fourier_decay_fit(to_spectral(u))
            except FitError as exc:
                logger.info('%s: no decay fit at t=%.4g (%s)', model.name, t, exc.message)
                continue
            for key, value in (('t', t), ('mu', fit.mu), ('delta', fit.delta),
                               ('residual', fit.residual), ('multiple', fit.multiple_singularities)):
                rows[key].append(float(value))
        result.tables[f'{name}_decay'] = Table.from_columns(**rows)
        if len(rows['delta']) > 1:
            result.metadata[f'{name}_delta_decreasing'] = rows['delta'][-1] < rows['delta'][0]


def _snapshot_runs(config, result, runs, t_end):
    """Final profiles of several models at one time: one (x, u) table per run."""
    labels = [label for label, _ in runs]
    eps = config.eps[0]
    pairs = _run_all(config, result, [spec for _, spec in runs], [eps] * len(runs),
                     [t_end] * len(runs), labels)
    for label, record in pairs:
        final = record.final
        result.tables[label] = Table.from_columns(x=final.grid.nodes, u=final.values)
        result.metadata[f'{label}_final_time'] = record.final_time


@experiment('kdv2-transition')
def kdv2_transition(config, result):
    data = initial_data(settings.LAB['DATA'])
    alphas = config.alphas or (config.alpha,)
    runs = []
    for alpha in alphas:
        spec = ('kdv2', {'alpha': float(alpha)})
        _critical(result, build_model(spec[0], **spec[1]), data,
                  prefix=f'alpha_{_label(alpha)}_critical')
        runs.append((f'alpha_{_label(alpha)}', spec))
    _snapshot_runs(config, result, runs, config.t_end)


@experiment('kawahara-zone')
def kawahara_zone(config, result):
    model = config.build_model()
    _critical(result, model, initial_data(settings.LAB['DATA']))
    _snapshot_runs(config, result, [('snapshot', config.model_spec())], config.t_end)


@experiment('nonlinear-dispersion')
def nonlinear_dispersion(config, result):
    """u_t + u u_x + eps^2 (c u_xx + c' u_x^2/2)_x + eps^4 (...)_x = 0 for p = 0 and p = +-u^2."""
    model = config.build_model()
    point = _critical(result, model, initial_data(settings.LAB['DATA']))
    t_end = point.t_c if config.t_end is None else config.t_end
    if any(config.p):
        variants = [('p_given', list(config.p))]
    else:
        variants = [('p_zero', [0.0]), ('p_plus', [0.0, 0.0, 1.0]), ('p_minus', [0.0, 0.0, -1.0])]
    runs = [(label, ('nonlinear-dispersion', {'c': list(config.c), 'p': p}))
            for label, p in variants]
    _snapshot_runs(config, result, runs, t_end)

    # predicted eps^4 discrepancy of the quasitriviality ansatz at half the breakup time
    grid = PeriodicGrid(config.half_width, config.size)
    lo, hi = config.window or DISCREPANCY_WINDOW
    x = grid.nodes[(grid.nodes >= lo) & (grid.nodes <= hi)]
    try:
        leading = hopf_discrepancy(initial_data(settings.LAB['DATA']), model, x, point.t_c / 2)
    except LabError as exc:
        result.metadata['discrepancy'] = f'unavailable: {exc.message}'
    else:
        result.tables['discrepancy'] = Table.from_columns(x=x, leading=leading)
        result.metadata['discrepancy_t'] = point.t_c / 2


@experiment('hamiltonian-checks')
def hamiltonian_checks(config, result):
    """Coefficient relations of the catalog and bracket scaling for random (f, g) pairs."""
    u_samples = np.linspace(*settings.LAB['U_RANGE'], 41)
    catalog = [('genkdv', {'n': n}) for n in range(1, 6)] + [
        ('sinh-kdv', {}), ('kawahara', {'alpha': 1.0, 'beta': 1.0}), ('kdv2', {'alpha': 0.5}),
        ('nonlinear-dispersion', {'c': [0.0, 0.0, 1.0], 'p': [0.0, 0.0, 1.0]}),
    ]
    names = []
    for kind, params in catalog:
        model = build_model(kind, **params)
        report = check_model(model, u_samples)
        result.metadata[f'coefficients_{model.name}'] = report.passed
        names.append(model.name)
        result.metadata[f'coefficients_{model.name}_worst'] = '%s=%.3e' % report.worst
    result.metadata['coefficients_all_passed'] = all(result.metadata[f'coefficients_{name}']
                                                    for name in names)

    model = config.build_model()
    c, p = model.c, model.p
    rng = np.random.default_rng(config.seed)
    grid = bracket_grid()
    fields = random_test_fields(grid, 3, rng)
    extension = order6_extension(c, p, u_range=settings.LAB['U_RANGE'])
    rows = {'pair': [], 'slope_order4': [], 'slope_order6': [], 'antisymmetry': []}
    for index in range(3):
        f, g = random_polynomial(rng), random_polynomial(rng)
        h_f, h_g = hf_density(f, c, p, tag='H_f'), hf_density(g, c, p, tag='H_g')
        forward = poisson_bracket(h_f, h_g, fields[0], 0.1)
        backward = poisson_bracket(h_g, h_f, fields[0], 0.1)
        base = minimum_slope(f, g, c, p, fields)
        extended = minimum_slope(f, g, c, p, fields, extension=extension)
        rows['pair'].append(index)
        rows['slope_order4'].append(np.nan if base is None else base)
        rows['slope_order6'].append(np.nan if extended is None else extended)
        rows['antisymmetry'].append(abs(forward + backward) / max(1.0, abs(forward)))
    result.tables['brackets'] = Table.from_columns(**rows)

    try:
        order6_extension(0.0, polynomial(0.0, 0.0, 1.0), u_range=settings.LAB['U_RANGE'])
    except ObstructionError as exc:
        result.metadata['obstruction'] = f'raised: {exc.message}'
    else:
        result.metadata['obstruction'] = 'not raised'


@experiment('obstruction')
def obstruction(config, result):
    """Bracket slopes with c = 0 for a few trial order-6 coefficients; reported, not judged."""
    rng = np.random.default_rng(config.seed)
    f, g = random_polynomial(rng), random_polynomial(rng)
    p = polynomial(*config.p)
    betas = [0.0, 1.0, polynomial(0.0, 1.0)]
    report = obstruction_demo(f, g, p, betas)
    slopes = [np.nan if scaling.vanishes else scaling.slope for scaling in report.values()]
    result.tables['slopes'] = Table.from_columns(trial=range(len(betas)), slope=slopes)
    finite = [value for value in slopes if np.isfinite(value)]
    result.metadata['max_slope'] = max(finite) if finite else 'n/a'
