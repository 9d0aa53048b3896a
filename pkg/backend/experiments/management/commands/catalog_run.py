from experiments.catalog import EXPERIMENTS
from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Run any experiment of the catalog by name'

    def add_arguments(self, parser):
        parser.add_argument('--experiment', required=True, choices=sorted(EXPERIMENTS),
                            help='Catalog experiment to run')
        super().add_arguments(parser)

    def experiment_name(self, options):
        return options['experiment']
