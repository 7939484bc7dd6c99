"""Time-stepping state, flow-domain indicators and output records."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..exceptions import ConfigurationError


@dataclass
class TimeScheme:
    """Theta-scheme step and the inner ADR controls."""

    dt: float
    theta: float = 1.0
    steps: int = 1
    substeps: int = 1
    adr_tolerance: float = 1e-6
    adr_max_iterations: int = 20000

    @property
    def outer_dt(self) -> float:
        return self.dt * self.substeps

    def validate(self) -> None:
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not 0.5 <= self.theta <= 1.0:
            raise ConfigurationError(
                f"theta={self.theta} violates the stability bound 0.5 <= theta <= 1"
            )
        if self.steps < 0 or self.substeps < 1:
            raise ConfigurationError("steps must be >= 0 and substeps >= 1")
        if not self.adr_tolerance > 0 or self.adr_max_iterations < 1:
            raise ConfigurationError("adr_tolerance must be positive and adr_max_iterations >= 1")

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "theta": self.theta,
            "steps": self.steps,
            "substeps": self.substeps,
            "adr_tolerance": self.adr_tolerance,
            "adr_max_iterations": self.adr_max_iterations,
        }


@dataclass
class SimState:
    """Evolving unknowns: displacement (2 dof/node), ADR velocity and pressure."""

    u: np.ndarray  # (N, 2)
    u_prev: np.ndarray  # (N, 2)
    v: np.ndarray  # (N, 2)
    p: np.ndarray  # (N,)
    t: float = 0.0
    step: int = 0

    @classmethod
    def zeros(cls, n_nodes: int) -> "SimState":
        return cls(
            u=np.zeros((n_nodes, 2)),
            u_prev=np.zeros((n_nodes, 2)),
            v=np.zeros((n_nodes, 2)),
            p=np.zeros(n_nodes),
        )

    @property
    def n_nodes(self) -> int:
        return len(self.p)

    def copy(self) -> "SimState":
        return SimState(
            u=self.u.copy(), u_prev=self.u_prev.copy(), v=self.v.copy(),
            p=self.p.copy(), t=self.t, step=self.step,
        )


@dataclass
class DomainIndicators:
    """Reservoir / fracture indicator values per node; chi_r + chi_f = 1."""

    c1: float
    c2: float
    reservoir: np.ndarray  # chi_r
    fracture: np.ndarray  # chi_f

    def fracture_nodes(self) -> np.ndarray:
        """Nodes fully in the fracture domain."""
        return np.flatnonzero(self.fracture >= 1.0)


@dataclass
class FlowProperties:
    """Per-node blended flow properties produced from damage and aperture."""

    density: np.ndarray
    biot: np.ndarray
    porosity: np.ndarray
    permeability: np.ndarray
    storage: np.ndarray
    coupling_biot: np.ndarray  # alpha entering Q; zero in the fracture domain

    def element_values(self, elements: np.ndarray, name: str) -> np.ndarray:
        """Average of the four nodal values of property ``name`` per element."""
        return getattr(self, name)[elements].mean(axis=1)


@dataclass
class TimeSeriesRow:
    """One output row of a scenario run."""

    step: int
    time: float
    injection_pressure: float
    crack_length: float
    cmod: float
    broken_bonds: int = 0

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "time": self.time,
            "injection_pressure": self.injection_pressure,
            "crack_length": self.crack_length,
            "cmod": self.cmod,
            "broken_bonds": self.broken_bonds,
        }


@dataclass
class OutputRecord:
    """Everything a scenario run produces."""

    scenario: str
    rows: List[TimeSeriesRow] = field(default_factory=list)
    snapshots: List[str] = field(default_factory=list)
    final_state: Optional[SimState] = None
    damage: Optional[np.ndarray] = None
    aperture: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([row.time for row in self.rows])

    @property
    def injection_pressures(self) -> np.ndarray:
        return np.array([row.injection_pressure for row in self.rows])

    @property
    def crack_lengths(self) -> np.ndarray:
        return np.array([row.crack_length for row in self.rows])
