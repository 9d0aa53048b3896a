import enum
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import fft

from spectral.models import PeriodicGrid, RealField, SpectralCoeffs


class ETDTables(NamedTuple):
    """exp(L dt), exp(L dt/2) and the three contour-averaged ETDRK4 weights."""

    E: np.ndarray
    E2: np.ndarray
    Q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray


class PropagatorCache:
    """Per-run store of ETDRK4 tables keyed by (dt, eps, model name, N, L)."""

    def __init__(self):
        self._tables: Dict[tuple, ETDTables] = {}

    @staticmethod
    def key(model, grid, dt, eps):
        return (float(dt), float(eps), model.name, grid.size, float(grid.half_width))

    def get(self, model, grid, dt, eps) -> Optional[ETDTables]:
        return self._tables.get(self.key(model, grid, dt, eps))

    def put(self, model, grid, dt, eps, tables: ETDTables):
        self._tables[self.key(model, grid, dt, eps)] = tables
        return tables

    def __len__(self):
        return len(self._tables)


@dataclass(frozen=True)
class StepperState:
    t: float
    u_hat: SpectralCoeffs
    cache: PropagatorCache = field(default_factory=PropagatorCache, repr=False, compare=False)

    @property
    def grid(self) -> PeriodicGrid:
        return self.u_hat.grid

    @classmethod
    def start(cls, u0: RealField, t=0.0):
        u0.require_valid()
        return cls(float(t), SpectralCoeffs(u0.grid, fft.fft(u0.values)))

    def advanced(self, dt, coeffs):
        return replace(self, t=self.t + dt, u_hat=SpectralCoeffs(self.grid, coeffs))

    def field(self) -> RealField:
        return RealField(self.grid, fft.ifft(self.u_hat.coeffs).real)


class EnergyRecord(NamedTuple):
    t: float
    energy: float
    drift: float


class RunStatus(str, enum.Enum):
    COMPLETED = 'completed'
    RESOLUTION_EXHAUSTED = 'resolution-exhausted'
    BLOWUP_SUSPECTED = 'blowup-suspected'


@dataclass(frozen=True)
class Monitors:
    """Thresholds checked while a run advances; ``every`` is in steps."""

    every: int = 10
    energy_tolerance: float = 1e-6
    mass_tolerance: float = 1e-10
    resolution_warning: float = 1e-8
    resolution_error: float = 1e-4
    blowup_linf: float = 1e6
    blowup_tail: float = 1e-2

    @classmethod
    def from_settings(cls, lab, **overrides):
        values = dict(
            energy_tolerance=lab['ENERGY_TOLERANCE'],
            mass_tolerance=lab['MASS_TOLERANCE'],
            resolution_warning=lab['RESOLUTION_WARNING'],
            resolution_error=lab['RESOLUTION_ERROR'],
            blowup_linf=lab['BLOWUP_LINF'],
            blowup_tail=lab['BLOWUP_TAIL'],
        )
        values.update(overrides)
        return cls(**values)


@dataclass
class RunRecord:
    model_name: str
    eps: float
    dt: float
    integrator: str
    grid: PeriodicGrid
    snapshots: List[Tuple[float, RealField]] = field(default_factory=list)
    energy: List[EnergyRecord] = field(default_factory=list)
    mass: List[Tuple[float, float]] = field(default_factory=list)
    linf: List[Tuple[float, float]] = field(default_factory=list)
    tails: List[Tuple[float, float]] = field(default_factory=list)
    status: RunStatus = RunStatus.COMPLETED
    message: str = ''
    flags: List[str] = field(default_factory=list)
    steps: int = 0

    @property
    def final(self) -> Optional[RealField]:
        return self.snapshots[-1][1] if self.snapshots else None

    @property
    def final_time(self):
        return self.snapshots[-1][0] if self.snapshots else None

    @property
    def max_energy_drift(self):
        return max((record.drift for record in self.energy), default=0.0)

    @property
    def max_mass_drift(self):
        if not self.mass:
            return 0.0
        m0 = self.mass[0][1]
        scale = abs(m0) if m0 else 1.0
        return max(abs(m - m0) for _, m in self.mass) / scale

    def snapshot_at(self, t, tol=1e-12):
        for time, u in self.snapshots:
            if abs(time - t) <= tol * max(1.0, abs(t)):
                return u
        raise KeyError(t)
