from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from equations.catalog import build_model
from equations.models import ModelKind

PARTIAL = 'partial'


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one experiment; built by RunConfigSerializer."""

    experiment: str
    model: str = ModelKind.GEN_KDV.value
    n: int = 1
    alpha: float = 1.0
    beta: float = 1.0
    c: Tuple[float, ...] = (0.0, 0.0, 1.0)
    p: Tuple[float, ...] = (0.0,)
    eps: Tuple[float, ...] = (1e-2,)
    half_width: float = 8 * np.pi
    size: int = 4096
    dt: float = 1e-4
    dealias: bool = False
    t_end: Optional[float] = None
    snapshots: Tuple[float, ...] = ()
    window: Tuple[float, ...] = ()
    orders: Tuple[int, ...] = ()
    alphas: Tuple[float, ...] = ()
    t_grid: Tuple[float, ...] = (0.0,)
    x_max: float = 400.0
    nodes: int = 4096
    output_dir: str = 'runs'
    seed: int = 0
    workers: int = 1

    def model_spec(self):
        """(kind, params) for build_model; plain data so worker processes can rebuild the model."""
        kind = ModelKind(self.model)
        if kind == ModelKind.GEN_KDV:
            return kind.value, {'n': self.n}
        if kind == ModelKind.KAWAHARA:
            return kind.value, {'alpha': self.alpha, 'beta': self.beta}
        if kind == ModelKind.KDV2_FAMILY:
            return kind.value, {'alpha': self.alpha}
        if kind == ModelKind.NONLINEAR_DISPERSION:
            return kind.value, {'c': list(self.c), 'p': list(self.p)}
        return kind.value, {}

    def build_model(self):
        kind, params = self.model_spec()
        return build_model(kind, **params)

    @property
    def run_directory(self):
        return Path(self.output_dir) / self.experiment


@dataclass(frozen=True)
class Table:
    """Named columns of equal length, persisted as one columnar file."""

    columns: Tuple[str, ...]
    data: np.ndarray = field(repr=False)

    @classmethod
    def from_columns(cls, **columns):
        names = tuple(columns)
        return cls(names, np.column_stack([np.asarray(columns[name], dtype=float)
                                           for name in names]))

    def __len__(self):
        return self.data.shape[0]

    def column(self, name):
        return self.data[:, self.columns.index(name)]


@dataclass
class ExperimentResult:
    """Everything one catalog entry produced: runs, tables, fits and scalar metadata."""

    experiment: str
    config: RunConfig
    status: str = 'completed'
    message: str = ''
    metadata: Dict[str, object] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)
    records: Dict[str, object] = field(default_factory=dict)
    fits: Dict[str, object] = field(default_factory=dict)
    pi2_tables: Dict[str, object] = field(default_factory=dict)

    @property
    def completed(self):
        return self.status == 'completed'

    def mark_partial(self, message):
        self.status = PARTIAL
        self.message = '; '.join(filter(None, [self.message, message]))
