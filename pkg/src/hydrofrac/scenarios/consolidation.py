"""Linear poro-elastic consolidation with the monolithic block scheme."""

import logging
from typing import Optional

import numpy as np

from ..exceptions import ConfigurationError
from ..models import OutputRecord, SimState, TimeSeriesRow
from ..services import fem_flow, fracture_coupling, pd_solid, solvers
from .base import BaseScenario

logger = logging.getLogger(__name__)


class ConsolidationScenario(BaseScenario):
    """
    Consolidation of a loaded porous column.

    The linear PD stiffness and pressure coupling are assembled once; each
    step solves the coupled (u, p) block system. The load is applied
    suddenly to the column at rest, so step 1 holds the undrained jump.
    """

    def build_solver(self) -> solvers.ConsolidationSolver:
        self.setup()
        if self.initially_broken:
            raise ConfigurationError("Consolidation runs do not support initial cracks")
        config = self.config
        grid, mesh, flow = self.grid, self.mesh, config.flow
        n = grid.n_nodes

        K = solvers.assemble_KPD(grid, self.bonds, config.solid)
        QPD = fracture_coupling.assemble_QPD(self.bonds, grid.volumes, flow.biot, kinematics="linear")
        templates = fem_flow.element_templates(mesh)
        ones = np.ones(mesh.n_elements)
        Q = fem_flow.assemble_Q(mesh, flow.biot * ones, templates)
        S = fem_flow.assemble_S(mesh, flow.storage_coefficient * ones, templates)
        H = fem_flow.assemble_H(mesh, flow.mobility * ones, templates)

        fixed = dict(self.displacement_constraints())
        fixed.update({2 * n + node: value for node, value in self.pressure_constraints().items()})
        self.load = self.traction_forces()
        self.source = np.zeros(n)
        for node, rate in self.sources():
            self.source[node] += rate
        return solvers.ConsolidationSolver(K, QPD, Q, S, H, config.time.dt, config.time.theta, fixed)

    def run(self, steps: Optional[int] = None) -> OutputRecord:
        solver = self.build_solver()
        n = self.grid.n_nodes
        n_steps = self._steps(steps)
        probe = self.probe_node()

        z = None
        state = SimState.zeros(n)
        record = OutputRecord(scenario=self.name)
        history = record.extras.setdefault("history", {})

        def unpack(z: np.ndarray) -> None:
            state.u_prev = state.u
            state.u = z[: 2 * n].reshape(-1, 2)
            state.p = z[2 * n:]

        if 0 in self.capture_steps:
            history[0] = (state.u.copy(), state.p.copy())
        for step in range(1, n_steps + 1):
            if z is None:
                z = solver.start(self.load, self.source)
            else:
                z = solver.step(z, self.load, self.source)
            unpack(z)
            state.step = step
            state.t = step * self.config.time.dt
            record.rows.append(
                TimeSeriesRow(
                    step=step,
                    time=state.t,
                    injection_pressure=float(state.p[probe]),
                    crack_length=0.0,
                    cmod=0.0,
                )
            )
            if step in self.capture_steps:
                history[step] = (state.u.copy(), state.p.copy())
            if self.wants_snapshot(step):
                zeros = np.zeros(n)
                path = self.write_snapshot(state, zeros, zeros, f"{self.name}_step{step:06d}.vtk")
                if path is not None:
                    record.snapshots.append(str(path))
            if step % 10 == 0:
                logger.info(f"[{self.name}] step {step}/{n_steps}, p(probe)={state.p[probe]:.4e}")

        record.final_state = state
        record.damage = pd_solid.damage(self.bonds, self.grid.volumes)
        record.aperture = np.zeros(n)
        return record
