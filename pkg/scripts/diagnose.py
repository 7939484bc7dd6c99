#!/usr/bin/env python3
"""Print discretisation statistics of a scenario preset."""

import sys
from pathlib import Path

import numpy as np

from hydrofrac.scenarios import create_scenario
from hydrofrac.services import fracture_coupling, pd_solid
from hydrofrac.services.config_loader import load_config


def main():
    if len(sys.argv) != 2:
        print("Usage: diagnose.py <config.yaml>")
        sys.exit(1)

    config = load_config(Path(sys.argv[1]))
    scenario = create_scenario(config)
    scenario.setup()
    grid, bonds = scenario.grid, scenario.bonds

    # 1. Discretisation
    print(f"=== {config.name}: {config.description} ===\n")
    print(f"  Grid:     {grid.nx + 1} x {grid.ny + 1} nodes ({grid.n_nodes} total), dx={grid.spacing}")
    print(f"  Horizon:  {config.grid.horizon} (m_ratio={config.grid.m_ratio})")
    family = np.diff(bonds.offsets)
    print(f"  Bonds:    {bonds.n_bonds // 2} pairs, family size {family.min()}..{family.max()}")
    print(f"  Elements: {scenario.mesh.n_elements}")
    print()

    # 2. Material
    print(f"=== Material ===")
    print(f"  Critical stretch:  {scenario.critical_stretch:.6e}")
    print(f"  Storage:           {config.flow.storage_coefficient:.6e} 1/Pa")
    print(f"  Plane-strain E':   {config.solid.plane_strain_modulus:.6e} Pa")
    print()

    # 3. Initial damage and flow domains
    phi = pd_solid.damage(bonds, grid.volumes)
    indicators = fracture_coupling.classify_domains(phi, config.coupling.c1, config.coupling.c2)
    transition = np.count_nonzero((indicators.fracture > 0.0) & (indicators.fracture < 1.0))
    print(f"=== Initial state ===")
    print(f"  Broken by initial cracks: {scenario.initially_broken}")
    print(f"  Max damage:               {phi.max():.4f}")
    print(f"  Fracture-domain nodes:    {len(indicators.fracture_nodes())}")
    print(f"  Transition nodes:         {transition}")
    if config.injection:
        print(f"  Injection nodes:          {[node for node, _ in scenario.sources()]}")


if __name__ == "__main__":
    main()
