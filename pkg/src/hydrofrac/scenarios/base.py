"""Abstract base class for simulation scenarios."""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from ..exceptions import ConfigurationError, HydrofracError
from ..models import BondTable, FluidMesh, NodeGrid, OutputRecord, ScenarioConfig, SimState
from ..services import discretization, pd_solid, writers

logger = logging.getLogger(__name__)


class BaseScenario(ABC):
    """
    Abstract base class for scenarios.

    Each scenario (consolidation, crack diffusion, pressure- or
    fluid-driven fracture) builds the shared discretisation from its
    configuration and implements ``run``.
    """

    def __init__(self, config: ScenarioConfig, out_dir: Optional[Path] = None):
        """
        Initialize the scenario with configuration.

        Args:
            config: Validated scenario configuration
            out_dir: Directory for snapshots and dumps (None: write nothing)
        """
        self.config = config
        self.name = config.name
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.capture_steps: Set[int] = set()
        self._built = False

    def setup(self) -> None:
        """Build grid, bonds, flow mesh and the initial cracks."""
        if self._built:
            return
        config = self.config
        self.grid: NodeGrid = discretization.build_grid(config.grid)
        self.bonds: BondTable = discretization.build_bonds(self.grid, config.grid.horizon)
        self.mesh: FluidMesh = discretization.build_fluid_mesh(self.grid)
        self.initially_broken = discretization.apply_initial_crack(config.cracks, self.grid, self.bonds)
        self.critical_stretch = pd_solid.critical_stretch(config.solid, config.grid.horizon)
        self._built = True
        logger.info(
            f"[{self.name}] {self.grid.n_nodes} nodes, {self.bonds.n_bonds // 2} bonds, "
            f"s_c={self.critical_stretch:.4e}"
        )

    @abstractmethod
    def run(self, steps: Optional[int] = None) -> OutputRecord:
        """
        Run the scenario.

        Args:
            steps: Number of outer steps (None: the configured count)

        Returns:
            OutputRecord with the time series and final fields
        """
        raise NotImplementedError

    def _steps(self, steps: Optional[int]) -> int:
        return self.config.time.steps if steps is None else steps

    # ---- Boundary conditions ----

    def _group_nodes(self, group: str, layers: int = 1) -> np.ndarray:
        """Nodes of ``group`` extended ``layers`` rows/columns into the domain."""
        grid = self.grid
        if group == "all":
            return np.arange(grid.n_nodes)
        cols, rows = grid.positions[:, 0], grid.positions[:, 1]
        reach = (layers - 1 + 0.5) * grid.spacing
        if group == "left":
            mask = cols <= reach
        elif group == "right":
            mask = cols >= grid.nx * grid.spacing - reach
        elif group == "bottom":
            mask = rows <= reach
        elif group == "top":
            mask = rows >= grid.ny * grid.spacing - reach
        else:
            raise ConfigurationError(f"Unknown boundary group '{group}'")
        return np.flatnonzero(mask)

    @staticmethod
    def _components(component: str) -> Tuple[int, ...]:
        return {"x": (0,), "y": (1,), "both": (0, 1)}[component]

    def displacement_constraints(self) -> Dict[int, float]:
        """Prescribed displacement dofs (2 * node + component)."""
        fixed: Dict[int, float] = {}
        for bc in self.config.boundary:
            if bc.kind != "displacement":
                continue
            for node in self._group_nodes(bc.group, bc.layers):
                for c in self._components(bc.component):
                    fixed[2 * int(node) + c] = float(bc.value)
        return fixed

    def pressure_constraints(self) -> Dict[int, float]:
        fixed: Dict[int, float] = {}
        for bc in self.config.boundary:
            if bc.kind == "pressure":
                for node in self._group_nodes(bc.group):
                    fixed[int(node)] = float(bc.value)
        return fixed

    def traction_forces(self) -> np.ndarray:
        """Nodal forces [N] from edge tractions, one cell width per edge node."""
        force = np.zeros(2 * self.grid.n_nodes)
        tributary = self.grid.spacing * self.grid.thickness
        for bc in self.config.boundary:
            if bc.kind != "traction":
                continue
            for node in self._group_nodes(bc.group):
                for c in self._components(bc.component):
                    force[2 * int(node) + c] += bc.value * tributary
        return force

    def sources(self) -> List[Tuple[int, float]]:
        """Injection points snapped to their nearest node."""
        snapped = []
        for injection in self.config.injection:
            node, distance = self.grid.nearest_node(injection.location)
            if distance > 0.5 * self.grid.spacing * (1 + 1e-9):
                raise ConfigurationError(
                    f"Injection at {injection.location} is {distance:.3e} m from the nearest node"
                )
            snapped.append((node, injection.rate))
        return snapped

    def probe_node(self) -> int:
        """Injection node, else the centre of the first crack, else the domain centre."""
        if self.config.injection:
            return self.sources()[0][0]
        if self.config.cracks:
            return self.grid.nearest_node(self.config.cracks[0].center)[0]
        centre = (0.5 * self.config.grid.extent_x, 0.5 * self.config.grid.extent_y)
        return self.grid.nearest_node(centre)[0]

    # ---- Output ----

    def write_snapshot(
        self, state: SimState, damage: np.ndarray, aperture: np.ndarray, filename: str
    ) -> Optional[Path]:
        if self.out_dir is None:
            return None
        path = self.out_dir / filename
        try:
            return writers.emit_snapshot(
                self.grid, self.mesh, state, {"damage": damage, "aperture": aperture}, path
            )
        except HydrofracError as e:
            logger.warning(f"[{self.name}] Snapshot not written: {e}")
            return None

    def wants_snapshot(self, step: int) -> bool:
        every = self.config.output.snapshot_every
        return every > 0 and step % every == 0
