"""Data models for hydrofrac."""

from .grid import GridConfig, NodeGrid, BondTable, FluidMesh
from .material import SolidMaterial, FlowMaterial
from .state import (
    TimeScheme,
    SimState,
    DomainIndicators,
    FlowProperties,
    TimeSeriesRow,
    OutputRecord,
)
from .scenario import (
    SCENARIO_NAMES,
    BOUNDARY_KINDS,
    BOUNDARY_GROUPS,
    COMPONENTS,
    CrackSegment,
    BoundaryCondition,
    Injection,
    CouplingSettings,
    LoadingSettings,
    OutputSettings,
    ScenarioConfig,
)

__all__ = [
    "GridConfig",
    "NodeGrid",
    "BondTable",
    "FluidMesh",
    "SolidMaterial",
    "FlowMaterial",
    "TimeScheme",
    "SimState",
    "DomainIndicators",
    "FlowProperties",
    "TimeSeriesRow",
    "OutputRecord",
    "SCENARIO_NAMES",
    "BOUNDARY_KINDS",
    "BOUNDARY_GROUPS",
    "COMPONENTS",
    "CrackSegment",
    "BoundaryCondition",
    "Injection",
    "CouplingSettings",
    "LoadingSettings",
    "OutputSettings",
    "ScenarioConfig",
]
