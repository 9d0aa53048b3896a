import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple, Tuple

import numpy as np

from hamiltonian.models import HamiltonianDensity
from .functions import SmoothFunction


class ModelKind(str, enum.Enum):
    GEN_KDV = 'genkdv'
    KAWAHARA = 'kawahara'
    NONLINEAR_DISPERSION = 'nonlinear-dispersion'
    KDV2_FAMILY = 'kdv2'
    SINH_KDV = 'sinh-kdv'


class StiffTerm(NamedTuple):
    """coefficient * eps**eps_power * d^order u / dx^order on the flux side of u_t + ... = 0."""

    order: int
    eps_power: int
    coefficient: float


@dataclass(frozen=True)
class ModelSpec:
    """A dispersive conservation law u_t + d/dx[A(u) + dispersive flux] + stiff terms = 0.

    ``a`` is the transport speed A'(u). The stiff constant-coefficient terms
    are integrated exactly by the exponential stepper; everything else lives in
    ``dispersive_flux(jet, eps)``.

    ``template`` holds the coefficients b_m(u) of the same law written in the
    general eps-expanded flux form (b_1 u_xx, b_2 u_x^2, ..., b_10 u_x^4).
    """

    kind: ModelKind
    params: Mapping[str, float]
    a: SmoothFunction
    flux: SmoothFunction
    c: SmoothFunction
    p: SmoothFunction
    stiff_terms: Tuple[StiffTerm, ...]
    dispersive_flux: Callable = field(repr=False)
    frozen_dispersion: Callable = field(repr=False)
    density: HamiltonianDensity = field(repr=False)
    flux_jet_order: int = 0
    template: Mapping[int, SmoothFunction] = field(default_factory=dict, repr=False)

    @property
    def name(self):
        args = ','.join(f'{key}={value:g}' if isinstance(value, (int, float)) else f'{key}={value}'
                        for key, value in sorted(self.params.items()))
        return f'{self.kind.value}({args})'

    @property
    def a_derivs(self):
        return tuple(self.a.derivative(order) for order in (1, 2, 3))

    @property
    def b1(self):
        return self.c * self.a.derivative()

    @property
    def has_stiff_linear_part(self):
        return bool(self.stiff_terms)

    def linear_symbol(self, k, eps):
        """Growth rate of exp(i k x) under the stiff terms alone."""
        symbol = np.zeros(np.shape(k), dtype=complex)
        for term in self.stiff_terms:
            symbol -= term.coefficient * eps ** term.eps_power * (1j * k) ** term.order
        return symbol

    def linear_symbol_on(self, grid, eps):
        """Stiff symbol on a grid; odd orders vanish at the Nyquist mode."""
        symbol = np.zeros(grid.size, dtype=complex)
        for term in self.stiff_terms:
            symbol -= term.coefficient * eps ** term.eps_power * grid.symbol(term.order)
        return symbol

    def frozen_symbol_on(self, grid, eps, ubar):
        symbol = self.frozen_symbol(grid.wavenumbers, eps, ubar)
        symbol[grid.nyquist_index] = symbol[grid.nyquist_index].real
        return symbol

    def frozen_symbol(self, k, eps, ubar):
        """Fourier symbol of the full right-hand side linearised at the constant state ubar."""
        advection = -1j * k * float(self.a(ubar))
        return advection + self.linear_symbol(k, eps) + self.frozen_dispersion(k, eps, ubar)

    def __hash__(self):
        return hash(self.name)

    def __eq__(self, other):
        return isinstance(other, ModelSpec) and self.name == other.name


class InvariantTable(NamedTuple):
    u: np.ndarray
    c: np.ndarray
    p: np.ndarray
