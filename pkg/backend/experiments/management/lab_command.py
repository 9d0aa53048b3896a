from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from breakup.exceptions import OutputError
from experiments.catalog import run_experiment
from experiments.outputs import emit_outputs
from experiments.serializers import build_config

# (flag, help); values are parsed and validated by RunConfigSerializer
CONFIG_FLAGS = (
    ('--model', 'Model kind: genkdv, kawahara, nonlinear-dispersion, kdv2, sinh-kdv'),
    ('--n', 'GenKdV exponent'),
    ('--alpha', 'Kawahara / KdV2 alpha'),
    ('--beta', 'Kawahara beta'),
    ('--c', 'Polynomial coefficients of c(u), ascending, comma separated'),
    ('--p', 'Polynomial coefficients of p(u), ascending, comma separated'),
    ('--eps', 'Dispersion parameter or comma-separated sweep'),
    ('--half-width', 'Half period L of the domain [-L, L]'),
    ('--size', 'Number of grid points (even)'),
    ('--dt', 'Time step'),
    ('--dealias', 'Apply the two-thirds filter after every step (true/false)'),
    ('--t-end', 'Final time (default: the breakup time where the experiment needs one)'),
    ('--snapshots', 'Comma-separated snapshot times'),
    ('--window', 'x-window as lo,hi'),
    ('--orders', 'GenKdV exponents for the scaling and blowup experiments'),
    ('--alphas', 'alpha values for kdv2-transition'),
    ('--t-grid', 'Scaled times T for the PI2 table'),
    ('--x-max', 'Half-width of the PI2 domain'),
    ('--nodes', 'Collocation nodes of the PI2 mesh'),
    ('--output-dir', 'Output root; results go to <output-dir>/<experiment>'),
    ('--seed', 'Random seed for the bracket tests'),
    ('--workers', 'Worker processes for sweeps'),
)

CONFIG_DESTS = tuple(flag[2:].replace('-', '_') for flag, _ in CONFIG_FLAGS)

EXIT_CONFIG = 1
EXIT_PARTIAL = 2


class LabCommand(BaseCommand):
    """Runs one catalog experiment: validate the configuration, run, write the outputs."""

    experiment = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Run configuration file (KEY=value); overrides flags')
        for flag, text in CONFIG_FLAGS:
            parser.add_argument(flag, default=None, help=text)

    def experiment_name(self, options):
        return self.experiment

    def handle(self, *args, **options):
        name = self.experiment_name(options)
        self.stdout.write(self.style.SUCCESS(f'🚀 Running experiment {name}...'))

        flags = {dest: options.get(dest) for dest in CONFIG_DESTS}
        try:
            config = build_config(flags, options.get('config'), name)
        except serializers.ValidationError as exc:
            self.stdout.write(self.style.ERROR(f'❌ Invalid configuration: {exc.detail}'))
            raise CommandError(f'Invalid configuration: {exc.detail}', returncode=EXIT_CONFIG)

        result = run_experiment(config)
        try:
            path = emit_outputs(result, config.run_directory)
        except OutputError as exc:
            self.stdout.write(self.style.ERROR(f'❌ Error writing outputs: {exc}'))
            raise CommandError(f'Error writing outputs: {exc}', returncode=EXIT_CONFIG)
        self.stdout.write(self.style.SUCCESS(f'✅ Outputs written to {path.parent}'))

        for label, fit in result.fits.items():
            self.stdout.write(f'   fit {label}: {fit}')

        if not result.completed:
            self.stdout.write(self.style.WARNING(f'⚠️ Experiment {name} is partial: {result.message}'))
            raise CommandError(f'Partial result: {result.message}', returncode=EXIT_PARTIAL)
        self.stdout.write(self.style.SUCCESS(f'\n🎉 Experiment {name} completed successfully!'))
