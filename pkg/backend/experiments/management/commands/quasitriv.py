from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Hopf and quasitriviality errors before breakup over an eps sweep'
    experiment = 'quasitriviality'
