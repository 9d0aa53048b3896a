from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Compare PDE, Hopf and multiscale solutions at the breakup time'
    experiment = 'breakup-universality'
