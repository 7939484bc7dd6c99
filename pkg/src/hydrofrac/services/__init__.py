"""Computational services for hydrofrac."""

from . import (
    config_loader,
    discretization,
    fem_flow,
    fracture_coupling,
    oracles,
    pd_solid,
    solvers,
    writers,
)
from .config_loader import dump_config, load_config
from .writers import emit_snapshot, emit_timeseries

__all__ = [
    "config_loader",
    "discretization",
    "fem_flow",
    "fracture_coupling",
    "oracles",
    "pd_solid",
    "solvers",
    "writers",
    "dump_config",
    "load_config",
    "emit_snapshot",
    "emit_timeseries",
]
