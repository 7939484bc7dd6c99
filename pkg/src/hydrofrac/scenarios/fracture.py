"""Shared driver of the staggered fracture scenarios."""

import logging
from typing import Callable, Optional

from ..exceptions import ConvergenceError
from ..models import OutputRecord, TimeSeriesRow
from ..services import solvers
from .base import BaseScenario

logger = logging.getLogger(__name__)


class FractureScenario(BaseScenario):
    """
    Base for scenarios solved with the staggered flow / PD loop.

    Subclasses choose how the crack is loaded through
    ``crack_face_pressure`` and may advance the solver before the loop.
    """

    crack_face_pressure: Optional[Callable[[int], float]] = None
    flow_enabled: bool = True
    stop_after_initiation: bool = False

    def build_solver(self) -> solvers.StaggeredSolver:
        self.setup()
        config = self.config
        problem = solvers.StaggeredProblem(
            grid=self.grid,
            bonds=self.bonds,
            mesh=self.mesh,
            solid=config.solid,
            flow=config.flow,
            coupling=config.coupling,
            scheme=config.time,
            critical_stretch=self.critical_stretch,
            fixed_dofs=self.displacement_constraints(),
            external_force=self.traction_forces(),
            pressure_bcs=self.pressure_constraints(),
            sources=self.sources(),
            probe_node=self.probe_node(),
            crack_face_pressure=self.crack_face_pressure,
            flow_enabled=self.flow_enabled,
        )
        solver = solvers.StaggeredSolver(problem)
        solver.on_abort = self._dump_abort
        self.solver = solver
        return solver

    def _dump_abort(self, solver: solvers.StaggeredSolver) -> None:
        step = solver.state.step + 1
        path = self.write_snapshot(solver.state, solver.phi, solver.aperture, f"abort_step{step:06d}.vtk")
        if path is not None:
            logger.error(f"[{self.name}] State before the failed step dumped to {path}")

    def prepare(self, solver: solvers.StaggeredSolver, record: OutputRecord) -> None:
        """Hook run once before the time loop."""

    def should_stop(self, solver: solvers.StaggeredSolver, row: TimeSeriesRow) -> bool:
        return self.stop_after_initiation and row.broken_bonds > 0

    def run(self, steps: Optional[int] = None) -> OutputRecord:
        solver = self.build_solver()
        n_steps = self._steps(steps)
        record = OutputRecord(scenario=self.name)
        self.prepare(solver, record)
        log_every = max(1, n_steps // 20)

        def on_step(solver: solvers.StaggeredSolver, row: TimeSeriesRow) -> None:
            if row.broken_bonds and "initiation_step" not in record.extras:
                record.extras["initiation_step"] = row.step
                record.extras["initiation_pressure"] = row.injection_pressure
                logger.info(
                    f"[{self.name}] Fracture initiation at step {row.step}, "
                    f"p={row.injection_pressure:.6e} Pa"
                )
            if self.wants_snapshot(row.step):
                path = self.write_snapshot(
                    solver.state, solver.phi, solver.aperture, f"{self.name}_step{row.step:06d}.vtk"
                )
                if path is not None:
                    record.snapshots.append(str(path))
            if row.step % log_every == 0:
                logger.info(
                    f"[{self.name}] step {row.step}: p={row.injection_pressure:.4e}, "
                    f"crack length={row.crack_length:.4f}"
                )

        remaining = max(0, n_steps - solver.state.step)
        try:
            return solvers.staggered_hf_loop(solver, remaining, on_step, self.should_stop, record)
        except ConvergenceError:
            logger.error(f"[{self.name}] Aborted after {len(record.rows)} steps")
            raise
