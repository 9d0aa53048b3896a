from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Evolve the configured model from sech2 data over an eps sweep'
    experiment = 'evolve'
