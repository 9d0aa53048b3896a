from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Breakup scaling of the Hopf error at t_c for several GenKdV orders'
    experiment = 'scaling'
