import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from numpy.testing import assert_array_equal
from django.conf import settings
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, override_settings, tag
from rest_framework import serializers

from breakup.exceptions import NearCausticError, OutputError
from pi2.storage import read_table
from spectral.models import PeriodicGrid
from stepping.models import EnergyRecord, RunRecord, RunStatus
from .catalog import EXPERIMENTS, fan_out, run_experiment
from .models import PARTIAL, ExperimentResult, RunConfig, Table
from .outputs import (
    METADATA_FILE, atomic_write, emit_outputs, read_columns, read_metadata, write_columns,
)
from .serializers import RunConfigSerializer, build_config, load_config_file


def validated(**data):
    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class RunConfigSerializerTests(SimpleTestCase):
    def test_defaults_come_from_settings(self):
        config = validated(experiment='evolve')
        self.assertEqual(config.model, 'genkdv')
        self.assertEqual(config.size, settings.LAB['GRID_SIZE'])
        self.assertEqual(config.half_width, settings.LAB['HALF_WIDTH'])
        self.assertIsNone(config.t_end)
        self.assertEqual(config.eps, (1e-2,))

    def test_comma_separated_lists(self):
        config = validated(experiment='evolve', eps='0.1, 0.05,0.01', snapshots='0.2,0.1')
        self.assertEqual(config.eps, (0.1, 0.05, 0.01))
        self.assertEqual(config.snapshots, (0.1, 0.2))

    def test_experiment_defaults_fill_missing_keys(self):
        config = validated(experiment='scaling')
        self.assertEqual(config.eps, tuple(settings.LAB['EPS_SWEEP']))
        self.assertEqual(config.orders, (1, 3, 4, 5))
        config = validated(experiment='quasitriviality')
        self.assertEqual(config.model, 'kawahara')
        self.assertEqual(config.window, (0.8, 2.0))
        self.assertEqual(len(config.eps), 9)

    def test_explicit_values_beat_experiment_defaults(self):
        config = validated(experiment='scaling', eps='0.1,0.05', orders='1')
        self.assertEqual(config.eps, (0.1, 0.05))
        self.assertEqual(config.orders, (1,))

    def test_invalid_values_are_reported_per_field(self):
        cases = {
            'size': {'size': 1023},
            'eps': {'eps': '0.1,-0.01'},
            'window': {'window': '2.0,1.0'},
            'x_max': {'x_max': 50},
            'experiment': {'experiment': 'no-such-experiment'},
        }
        for field, data in cases.items():
            with self.subTest(field=field):
                serializer = RunConfigSerializer(data={'experiment': 'evolve', **data})
                self.assertFalse(serializer.is_valid())
                self.assertIn(field, serializer.errors)

    def test_model_parameters_are_checked(self):
        serializer = RunConfigSerializer(data={'experiment': 'evolve', 'model': 'kawahara',
                                               'beta': 0.0})
        self.assertFalse(serializer.is_valid())
        self.assertIn('model', serializer.errors)

    def test_snapshots_after_final_time(self):
        serializer = RunConfigSerializer(data={'experiment': 'evolve', 't_end': 0.1,
                                               'snapshots': '0.05,0.2'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('snapshots', serializer.errors)

    def test_model_spec_round_trips_through_build_model(self):
        config = validated(experiment='evolve', model='kdv2', alpha=0.5)
        self.assertEqual(config.model_spec(), ('kdv2', {'alpha': 0.5}))
        self.assertEqual(config.build_model().kind.value, 'kdv2')

    def test_representation_lists_every_field(self):
        config = validated(experiment='evolve', eps='0.1,0.05')
        data = RunConfigSerializer(config).data
        self.assertEqual(set(data), set(RunConfigSerializer().fields))
        self.assertEqual(list(data['eps']), [0.1, 0.05])


class ConfigFileTests(SimpleTestCase):
    def write(self, directory, text):
        path = Path(directory) / 'run.env'
        path.write_text(text)
        return path

    def test_file_overrides_flags(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, '# sweep\nEPS=0.05,0.02\nsize=512\nT-END=0.1\n')
            config = build_config({'size': '1024', 'dt': '0.001', 'eps': None}, path, 'evolve')
        self.assertEqual(config.size, 512)
        self.assertEqual(config.eps, (0.05, 0.02))
        self.assertEqual(config.t_end, 0.1)
        self.assertEqual(config.dt, 0.001)

    def test_unknown_key_rejected(self):
        with tempfile.TemporaryDirectory() as directory:
            path = self.write(directory, 'EPS=0.1\nGRID=512\n')
            with self.assertRaises(serializers.ValidationError):
                load_config_file(path)

    def test_missing_file_rejected(self):
        with self.assertRaises(serializers.ValidationError):
            build_config({}, '/nonexistent/run.env', 'evolve')


class OutputFileTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def test_columns_read_back_bitwise(self):
        rng = np.random.default_rng(7)
        values = rng.standard_normal((50, 3)) * 10.0 ** rng.integers(-300, 300, (50, 3))
        values[0] = [np.pi, -0.0, 1e-320]
        table = Table(('x', 'u', 'v'), values)
        write_columns(self.root / 'data.dat', table, header={'t': 0.25})
        restored, header = read_columns(self.root / 'data.dat')
        self.assertEqual(restored.columns, ('x', 'u', 'v'))
        assert_array_equal(restored.data, values)
        self.assertEqual(float(header['t']), 0.25)

    def test_empty_table(self):
        write_columns(self.root / 'empty.dat', Table.from_columns(eps=[], error=[]))
        restored, _ = read_columns(self.root / 'empty.dat')
        self.assertEqual(len(restored), 0)
        self.assertEqual(restored.columns, ('eps', 'error'))

    def test_failed_write_leaves_target_untouched(self):
        target = self.root / 'data.dat'
        target.write_text('original\n')
        with self.assertRaises(RuntimeError):
            with atomic_write(target) as handle:
                handle.write('partial')
                raise RuntimeError('interrupted')
        self.assertEqual(target.read_text(), 'original\n')
        self.assertEqual(sorted(p.name for p in self.root.iterdir()), ['data.dat'])

    def test_unwritable_destination(self):
        blocker = self.root / 'blocker'
        blocker.write_text('')
        with self.assertRaises(OutputError):
            write_columns(blocker / 'data.dat', Table.from_columns(x=[1.0]))

    def test_empty_result_writes_metadata_only(self):
        result = ExperimentResult('evolve', RunConfig('evolve'))
        emit_outputs(result, self.root / 'run')
        self.assertEqual([p.name for p in (self.root / 'run').iterdir()], [METADATA_FILE])
        metadata = read_metadata(self.root / 'run')
        self.assertEqual(metadata['EXPERIMENT'], 'evolve')
        self.assertEqual(metadata['STATUS'], 'completed')
        self.assertEqual(float(metadata['CONFIG_HALF_WIDTH']), 8 * np.pi)
        self.assertEqual(float(metadata['LAB_ENERGY_TOLERANCE']), settings.LAB['ENERGY_TOLERANCE'])

    def test_snapshot_files(self):
        grid = PeriodicGrid(8 * np.pi, 2 ** 10)
        u = grid.sample(lambda x: 1 / np.cosh(x) ** 2)
        record = RunRecord(model_name='GenKdV(1)', eps=0.1, dt=1e-3, integrator='etdrk4',
                           grid=grid, snapshots=[(0.0, u)],
                           energy=[EnergyRecord(0.0, 0.4, 0.0)], mass=[(0.0, 2.0)])
        result = ExperimentResult('evolve', RunConfig('evolve'), records={'eps_0.1': record})
        emit_outputs(result, self.root)
        restored, header = read_columns(self.root / 'runs' / 'eps_0.1' / 'snapshot_000.dat')
        self.assertEqual(len(restored), 1024)
        self.assertEqual(restored.columns, ('x', 'u'))
        assert_array_equal(restored.column('u'), u.values)
        assert_array_equal(restored.column('x'), grid.nodes)
        self.assertTrue((self.root / 'runs' / 'eps_0.1' / 'energy.dat').is_file())
        self.assertFalse((self.root / 'runs' / 'eps_0.1' / 'linf.dat').exists())
        metadata = read_metadata(self.root)
        self.assertEqual(metadata['RUN_EPS_0_1_STATUS'], 'completed')
        self.assertEqual(metadata['RUN_EPS_0_1_INTEGRATOR'], 'etdrk4')

    def test_metadata_values_survive_quoting(self):
        result = ExperimentResult('hopf', RunConfig('hopf'))
        result.mark_partial('solver said "no"\nand stopped at C:\\tmp')
        result.metadata['flag'] = True
        result.metadata['ratio'] = 0.1
        emit_outputs(result, self.root)
        metadata = read_metadata(self.root)
        self.assertEqual(metadata['STATUS'], PARTIAL)
        self.assertEqual(metadata['MESSAGE'], 'solver said "no"\nand stopped at C:\\tmp')
        self.assertEqual(metadata['META_FLAG'], 'true')
        self.assertEqual(float(metadata['META_RATIO']), 0.1)


class CatalogTests(SimpleTestCase):
    def test_fan_out_keeps_order(self):
        self.assertEqual(fan_out(pow, [2, 3, 4], [2, 2, 2]), [4, 9, 16])
        self.assertEqual(fan_out(pow), [])

    def test_module_error_keeps_partial_output(self):
        def failing(config, result):
            result.tables['before'] = Table.from_columns(x=[1.0, 2.0])
            raise NearCausticError('Denominator of the correction vanishes', x=1.0)

        with mock.patch.dict(EXPERIMENTS, {'evolve': failing}):
            result = run_experiment(RunConfig('evolve'))
        self.assertEqual(result.status, PARTIAL)
        self.assertIn('NearCausticError', result.message)
        self.assertEqual(result.metadata['error'], 'NearCausticError')
        self.assertIn('before', result.tables)

    def test_hopf_experiment(self):
        result = run_experiment(RunConfig('hopf', size=512))
        self.assertTrue(result.completed)
        self.assertAlmostEqual(result.metadata['critical_t_c'], 3 ** 1.5 / 24, places=10)
        self.assertAlmostEqual(result.metadata['critical_x_c'], 1.5245, places=4)
        table = result.tables['hopf']
        self.assertEqual(len(table), 512)
        self.assertTrue(np.all(np.isfinite(table.column('u_hopf'))))

    def test_obstruction_is_recorded(self):
        result = run_experiment(RunConfig('hamiltonian-checks', seed=3))
        self.assertTrue(result.completed)
        self.assertTrue(result.metadata['obstruction'].startswith('raised'))
        self.assertTrue(result.metadata['coefficients_all_passed'])
        self.assertLess(np.max(result.tables['brackets'].column('antisymmetry')), 1e-10)


@tag('slow')
class AcceptanceRunTests(SimpleTestCase):
    def assertFit(self, fit, slope, tolerance):
        self.assertGreaterEqual(fit.slope, slope - tolerance)
        self.assertLessEqual(fit.slope, slope + tolerance)

    def test_breakup_scaling(self):
        result = run_experiment(validated(experiment='scaling', orders='1', size=2 ** 15))
        self.assertTrue(result.completed, result.message)
        self.assertEqual(len(result.tables['n1']), 7)
        fit = result.fits['n1']
        self.assertFit(fit, 0.30, 0.05)
        self.assertGreater(fit.r, 0.995)

    def test_quasitriviality(self):
        result = run_experiment(validated(experiment='quasitriviality'))
        self.assertTrue(result.completed, result.message)
        self.assertEqual(result.config.window, (0.8, 2.0))
        self.assertEqual(len(result.tables['errors']), 9)
        self.assertFit(result.fits['hopf'], 1.94, 0.15)
        self.assertFit(result.fits['quasitriv'], 3.77, 0.35)

    def test_conservation_law(self):
        result = run_experiment(validated(experiment='conservation-law'))
        self.assertTrue(result.completed, result.message)
        self.assertEqual(result.config.n, 5)
        self.assertFit(result.fits['hopf'], 1.99, 0.05)

    def test_breakup_universality(self):
        for model in ({'model': 'genkdv'}, {'model': 'kawahara', 'alpha': 1.0, 'beta': -1.0}):
            with self.subTest(**model):
                result = run_experiment(validated(experiment='breakup-universality',
                                                  eps='0.01,0.02,0.04', size=2 ** 14, **model))
                self.assertTrue(result.completed, result.message)
                self.assertLessEqual(result.metadata['error_ratio'], 0.7)
                self.assertGreaterEqual(result.fits['multiscale'].slope, 4 / 7 - 0.1)
                window = result.tables['window_eps_0.01']
                self.assertEqual(window.columns, ('x', 'u_pde', 'u_hopf', 'u_multiscale'))

    def test_blowup(self):
        result = run_experiment(validated(experiment='blowup'))
        for n in (4, 5):
            with self.subTest(n=n):
                record = result.records[f'n{n}_eps_0.1']
                self.assertIn(record.status, (RunStatus.COMPLETED, RunStatus.RESOLUTION_EXHAUSTED))
                self.assertTrue(np.all(np.isfinite(record.final.values)))
                self.assertGreater(record.final_time, result.metadata[f'n{n}_critical_t_c'])
                self.assertTrue(result.metadata[f'n{n}_linf_growing'])
                self.assertTrue(result.metadata[f'n{n}_delta_decreasing'])

    def test_kdv2_transition(self):
        result = run_experiment(validated(experiment='kdv2-transition', size=2 ** 14, dt=2.5e-5))
        self.assertTrue(result.completed, result.message)
        for alpha in ('0.5', '1', '1.2'):
            with self.subTest(alpha=alpha):
                self.assertLess(result.metadata[f'alpha_{alpha}_critical_t_c'], 0.04)
                self.assertEqual(result.metadata[f'alpha_{alpha}_final_time'], 0.04)
                u = result.tables[f'alpha_{alpha}'].column('u')
                peaks = np.sum((u[1:-1] > u[:-2]) & (u[1:-1] > u[2:]))
                self.assertGreater(peaks, 3)

    def test_kawahara_zone(self):
        result = run_experiment(validated(experiment='kawahara-zone', size=2 ** 14))
        self.assertTrue(result.completed, result.message)
        self.assertLess(result.metadata['critical_t_c'], 0.25)
        self.assertEqual(result.metadata['snapshot_final_time'], 0.25)
        self.assertEqual(len(result.tables['snapshot']), 2 ** 14)


class CommandTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def call(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, output_dir=str(self.root), **options)
        return out.getvalue()

    def test_hopf(self):
        output = self.call('hopf', size='1024')
        self.assertIn('completed successfully', output)
        metadata = read_metadata(self.root / 'hopf')
        self.assertEqual(metadata['STATUS'], 'completed')
        self.assertAlmostEqual(float(metadata['META_CRITICAL_T_C']), 3 ** 1.5 / 24, places=10)
        table, _ = read_columns(self.root / 'hopf' / 'tables' / 'hopf.dat')
        self.assertEqual(table.columns, ('x', 'u_hopf'))
        self.assertEqual(len(table), 1024)

    def test_catalog_run_matches_named_command(self):
        self.call('catalog_run', experiment='hopf', size='256', window='0,3')
        table, _ = read_columns(self.root / 'hopf' / 'tables' / 'hopf.dat')
        self.assertGreaterEqual(table.column('x').min(), 0.0)
        self.assertLessEqual(table.column('x').max(), 3.0)

    @override_settings(LAB={**settings.LAB, 'PI2_TOL': 1e-8})
    def test_pi2(self):
        self.call('pi2', t_grid='0', x_max='100', nodes='2048')
        table = read_table(self.root / 'pi2' / 'pi2_table.dat')
        self.assertEqual(table.T_values, (0.0,))
        self.assertEqual(table.x_max, 100.0)
        residuals, _ = read_columns(self.root / 'pi2' / 'tables' / 'pi2_solves.dat')
        self.assertLess(residuals.column('residual')[0], 1e-8)

    def test_evolve(self):
        self.call('evolve', eps='0.1', size='512', dt='0.01', t_end='0.05', snapshots='0.015')
        run = self.root / 'evolve' / 'runs' / 'eps_0.1'
        self.assertEqual(sorted(p.name for p in run.glob('snapshot_*.dat')),
                         ['snapshot_000.dat', 'snapshot_001.dat', 'snapshot_002.dat'])
        _, header = read_columns(run / 'snapshot_001.dat')
        self.assertEqual(float(header['t']), 0.015)
        metadata = read_metadata(self.root / 'evolve')
        self.assertEqual(metadata['RUN_EPS_0_1_STEPS'], '6')
        self.assertEqual(metadata['RUN_EPS_0_1_SNAPSHOT_TIMES'], '0,0.014999999999999999,0.050000000000000003')

    def test_invalid_configuration_exits_with_one(self):
        with self.assertRaises(CommandError) as caught:
            self.call('evolve', size='15')
        self.assertEqual(caught.exception.returncode, 1)
        self.assertFalse((self.root / 'evolve').exists())

    def test_partial_run_exits_with_two(self):
        with self.assertRaises(CommandError) as caught:
            self.call('evolve', eps='0.03', size='256', dt='0.001', t_end='0.6')
        self.assertEqual(caught.exception.returncode, 2)
        metadata = read_metadata(self.root / 'evolve')
        self.assertEqual(metadata['STATUS'], PARTIAL)
        self.assertNotEqual(metadata['RUN_EPS_0_03_STATUS'], 'completed')
        self.assertTrue((self.root / 'evolve' / 'runs' / 'eps_0.03' / 'snapshot_000.dat').is_file())
