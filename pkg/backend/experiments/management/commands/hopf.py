from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Critical point and dispersionless profile of the configured model'
    experiment = 'hopf'
