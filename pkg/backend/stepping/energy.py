from hamiltonian.variational import functional_value
from spectral.models import RealField


def energy(model, u: RealField, eps):
    """E(u) = -integral of the model's Hamiltonian density.

    For GenKdV(n) this is the integral of eps^2 u_x^2/2 - 6 u^(n+2)/((n+1)(n+2)).
    """
    return -functional_value(model.density, u, eps)


def mass(u: RealField):
    u.require_valid()
    return u.integral()
