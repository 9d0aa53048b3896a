from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Coefficient relations and bracket scaling of the Hamiltonian structure'
    experiment = 'hamiltonian-checks'
