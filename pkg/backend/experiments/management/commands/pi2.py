from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Tabulate the PI2 solution on a grid of scaled times'
    experiment = 'pi2'
