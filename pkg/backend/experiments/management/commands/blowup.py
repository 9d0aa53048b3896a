from experiments.management.lab_command import LabCommand


class Command(LabCommand):
    help = 'Long GenKdV runs with sup-norm and Fourier strip diagnostics'
    experiment = 'blowup'
