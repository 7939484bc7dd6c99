"""Transient pressure diffusion along a pre-existing crack (flow only)."""

import logging
from typing import Optional

import numpy as np

from ..models import OutputRecord, SimState, TimeSeriesRow
from ..services import fem_flow, fracture_coupling, pd_solid, solvers
from .base import BaseScenario

logger = logging.getLogger(__name__)


class CrackDiffusionScenario(BaseScenario):
    """
    Pressure front entering a crack from a pressurised edge.

    The solid is frozen: damage from the initial cracks fixes the fracture
    domain and the aperture (prescribed through ``coupling``) fixes its
    cubic-law permeability. Only the flow equation is advanced.
    """

    def build_stepper(self) -> solvers.FlowStepper:
        self.setup()
        config = self.config
        n = self.grid.n_nodes
        self.damage = pd_solid.damage(self.bonds, self.grid.volumes)
        self.indicators, self.props, operators = fracture_coupling.update_flow_properties(
            self.mesh, self.damage, np.zeros(n), config.flow, config.coupling
        )
        system = fem_flow.FlowSystem(
            S=operators.S, H=operators.H, Q=operators.Q, q=np.zeros(n), gravity=operators.gravity
        )
        system = fem_flow.apply_flow_bcs(system, self.pressure_constraints().items(), self.sources())
        logger.info(
            f"[{self.name}] {len(self.indicators.fracture_nodes())} fracture-domain nodes, "
            f"{len(system.dirichlet)} pressure constraints"
        )
        return solvers.FlowStepper(system, config.time.dt, config.time.theta)

    def aperture(self) -> np.ndarray:
        prescribed = self.config.coupling.prescribed_aperture or 0.0
        return np.where(self.indicators.fracture > 0.0, prescribed, 0.0)

    def run(self, steps: Optional[int] = None) -> OutputRecord:
        stepper = self.build_stepper()
        n = self.grid.n_nodes
        n_steps = self._steps(steps)
        probe = self.probe_node()
        dt = self.config.time.dt
        aperture = self.aperture()

        state = SimState.zeros(n)
        for node, value in stepper.system.dirichlet.items():
            state.p[node] = value
        record = OutputRecord(scenario=self.name)
        history = record.extras.setdefault("history", {})
        log_every = max(1, n_steps // 10)

        for step in range(1, n_steps + 1):
            state.p = stepper.step(state.p)
            state.step = step
            state.t = step * dt
            record.rows.append(
                TimeSeriesRow(
                    step=step,
                    time=state.t,
                    injection_pressure=float(state.p[probe]),
                    crack_length=0.0,
                    cmod=float(aperture[probe]),
                )
            )
            if step in self.capture_steps:
                history[step] = state.p.copy()
            if self.wants_snapshot(step):
                path = self.write_snapshot(state, self.damage, aperture, f"{self.name}_step{step:06d}.vtk")
                if path is not None:
                    record.snapshots.append(str(path))
            if step % log_every == 0:
                logger.info(f"[{self.name}] step {step}/{n_steps}")

        record.final_state = state
        record.damage = self.damage
        record.aperture = aperture
        return record
