"""Crack loaded by a ramped internal pressure."""

import logging
import math
from typing import Optional

import numpy as np

from ..models import OutputRecord, ScenarioConfig, TimeSeriesRow
from ..services import fracture_coupling, pd_solid, solvers
from .fracture import FractureScenario

logger = logging.getLogger(__name__)

# Steps kept before the predicted first failure when fast-forwarding
FAST_FORWARD_MARGIN = 2


class PressureDrivenScenario(FractureScenario):
    """
    Pre-existing crack opened by a pressure applied on its fracture domain.

    The pressure rises linearly to ``loading.final_pressure`` over
    ``loading.ramp_steps`` steps and acts on every node as ``P chi_f``.
    Before the first bond breaks the response is linear in P, so with
    ``fast_forward`` one solve at the final pressure predicts the first
    failing step and the loop starts just before it.
    """

    def __init__(self, config: ScenarioConfig, out_dir=None):
        super().__init__(config, out_dir)
        self.crack_face_pressure = config.loading.pressure_at
        self.flow_enabled = config.loading.flow_enabled

    def unit_response(self, solver: solvers.StaggeredSolver) -> np.ndarray:
        """Displacement per Pascal of crack pressure, from a solve at the final pressure."""
        final = self.config.loading.final_pressure
        field = final * solver.indicators.fracture
        result = solver.relaxation.solve(np.zeros_like(solver.state.u), field, solver.props.biot)
        return result.u / final

    def prepare(self, solver: solvers.StaggeredSolver, record: OutputRecord) -> None:
        loading = self.config.loading
        if not loading.final_pressure > 0:
            return
        response = self.unit_response(solver)
        record.extras["unit_response"] = response
        if not (loading.fast_forward and not self.flow_enabled):
            return

        stretch = pd_solid.bond_stretch(self.bonds, response * loading.final_pressure)
        intact = self.bonds.intact
        peak = float(stretch[intact].max()) if np.any(intact) else 0.0
        if peak > 0:
            first_failure = math.ceil(loading.ramp_steps * self.critical_stretch / peak)
        else:
            first_failure = loading.ramp_steps + 1
        jump = max(0, min(first_failure, loading.ramp_steps + 1) - FAST_FORWARD_MARGIN)
        if jump == 0:
            return

        pressure = loading.pressure_at(jump)
        state = solver.state
        state.u = response * pressure
        state.u_prev = state.u.copy()
        state.p = pressure * solver.indicators.fracture
        state.step = jump
        state.t = jump * self.config.time.outer_dt
        solver.aperture = fracture_coupling.compute_aperture(
            self.bonds, state.u, self.critical_stretch, solver.family_radius
        )
        solver.refresh_flow()
        record.extras["fast_forward_step"] = jump
        logger.info(
            f"[{self.name}] Linear response predicts failure at step {first_failure}; "
            f"fast-forwarded to step {jump} (P={pressure:.6e} Pa)"
        )

    def run(self, steps: Optional[int] = None) -> OutputRecord:
        record = super().run(steps)
        if "initiation_step" in record.extras:
            record.extras["initiation_pressure"] = self.config.loading.pressure_at(record.extras["initiation_step"])
        return record
