"""Scenario configuration models."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .grid import GridConfig
from .material import FlowMaterial, SolidMaterial
from .state import TimeScheme

SCENARIO_NAMES = ("consolidation", "crack-diffusion", "pressure-driven", "fluid-driven")
BOUNDARY_KINDS = ("pressure", "displacement", "traction")
BOUNDARY_GROUPS = ("left", "right", "bottom", "top", "all")
COMPONENTS = ("x", "y", "both")


@dataclass
class CrackSegment:
    """Straight initial crack; bonds whose chord crosses it start broken."""

    start: Tuple[float, float]
    end: Tuple[float, float]

    @property
    def length(self) -> float:
        return ((self.end[0] - self.start[0]) ** 2 + (self.end[1] - self.start[1]) ** 2) ** 0.5

    @property
    def center(self) -> Tuple[float, float]:
        return (0.5 * (self.start[0] + self.end[0]), 0.5 * (self.start[1] + self.end[1]))

    def to_dict(self) -> dict:
        return {"start": list(self.start), "end": list(self.end)}


@dataclass
class BoundaryCondition:
    """
    Condition applied to a named node group.

    ``pressure`` fixes p, ``displacement`` fixes u on ``layers`` node rows
    from the edge, ``traction`` applies a surface load [Pa] to the edge nodes.
    """

    group: str
    kind: str
    value: float = 0.0
    component: str = "both"
    layers: int = 1

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "kind": self.kind,
            "value": self.value,
            "component": self.component,
            "layers": self.layers,
        }


@dataclass
class Injection:
    """Point fluid source; ``location`` snaps to the nearest node."""

    location: Tuple[float, float]
    rate: float  # [m^3/s]

    def to_dict(self) -> dict:
        return {"location": list(self.location), "rate": self.rate}


@dataclass
class CouplingSettings:
    """Damage thresholds and aperture controls for the fracture/flow bridge."""

    c1: float = 0.2
    c2: float = 0.35
    aperture_family_ratio: Optional[float] = None  # None: full horizon
    prescribed_aperture: Optional[float] = None
    kinematics: str = "finite"

    def to_dict(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "aperture_family_ratio": self.aperture_family_ratio,
            "prescribed_aperture": self.prescribed_aperture,
            "kinematics": self.kinematics,
        }


@dataclass
class LoadingSettings:
    """Crack-face pressure ramp of the pressure-driven scenario."""

    final_pressure: float = 0.0
    ramp_steps: int = 1
    fast_forward: bool = True
    flow_enabled: bool = True

    def pressure_at(self, step: int) -> float:
        return self.final_pressure * min(step, self.ramp_steps) / self.ramp_steps

    def to_dict(self) -> dict:
        return {
            "final_pressure": self.final_pressure,
            "ramp_steps": self.ramp_steps,
            "fast_forward": self.fast_forward,
            "flow_enabled": self.flow_enabled,
        }


@dataclass
class OutputSettings:
    snapshot_every: int = 0  # 0: no snapshots
    timeseries: bool = True

    def to_dict(self) -> dict:
        return {"snapshot_every": self.snapshot_every, "timeseries": self.timeseries}


@dataclass
class ScenarioConfig:
    """A fully validated scenario description."""

    name: str
    grid: GridConfig
    solid: SolidMaterial
    flow: FlowMaterial
    time: TimeScheme
    description: str = ""
    cracks: List[CrackSegment] = field(default_factory=list)
    boundary: List[BoundaryCondition] = field(default_factory=list)
    injection: List[Injection] = field(default_factory=list)
    coupling: CouplingSettings = field(default_factory=CouplingSettings)
    loading: LoadingSettings = field(default_factory=LoadingSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def to_dict(self) -> dict:
        return {
            "scenario": {"name": self.name, "description": self.description},
            "grid": self.grid.to_dict(),
            "solid": self.solid.to_dict(),
            "flow": self.flow.to_dict(),
            "time": self.time.to_dict(),
            "coupling": self.coupling.to_dict(),
            "cracks": [crack.to_dict() for crack in self.cracks],
            "boundary": [bc.to_dict() for bc in self.boundary],
            "injection": [inj.to_dict() for inj in self.injection],
            "loading": self.loading.to_dict(),
            "output": self.output.to_dict(),
        }
