"""
Time integration drivers.

- ``linear_solve`` / ``FactorizedSolver``: sparse direct solves with a
  residual contract.
- ``flow_step`` / ``FlowStepper``: theta-scheme pressure update.
- ``assemble_KPD``: linear PD stiffness by coloured unit-displacement probing.
- ``consolidation_step`` / ``ConsolidationSolver``: monolithic u-p block scheme.
- ``adr_solve`` / ``AdaptiveDynamicRelaxation``: quasi-static PD displacement.
- ``StaggeredSolver`` / ``staggered_hf_loop``: flow, solid, failure, properties.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..exceptions import ConvergenceError, SolverError
from ..models import (
    BondTable,
    CouplingSettings,
    FlowMaterial,
    FluidMesh,
    NodeGrid,
    OutputRecord,
    SimState,
    SolidMaterial,
    TimeScheme,
    TimeSeriesRow,
)
from . import fem_flow, fracture_coupling, pd_solid
from .fem_flow import FlowSystem

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
REFINEMENT_STEPS = 3

# ADR fictitious mass = safety * (dt^2 / 4) * Gershgorin row sum, dt = 1
ADR_MASS_SAFETY = 1.5
ADR_MAX_DAMPING = 1.99
ADR_LOG_EVERY = 500


# ---- Linear solves ----

class FactorizedSolver:
    """
    LU factorisation of a sparse matrix with a residual-checked solve.

    The matrix is symmetrically equilibrated by its diagonal before
    factorisation; residuals are checked on the original system and
    improved by a few steps of iterative refinement when needed.
    """

    def __init__(self, A: sp.spmatrix, rtol: float = RESIDUAL_TOLERANCE):
        self.A = sp.csc_matrix(A)
        self.rtol = rtol
        n, m = self.A.shape
        if n != m:
            raise SolverError(f"Matrix must be square, got {self.A.shape}")
        diagonal = np.abs(self.A.diagonal())
        self.scale = np.where(diagonal > 0, 1.0 / np.sqrt(np.where(diagonal > 0, diagonal, 1.0)), 1.0)
        D = sp.diags(self.scale)
        try:
            self._lu = splu(sp.csc_matrix(D @ self.A @ D))
        except RuntimeError as e:
            raise SolverError(
                f"Factorisation failed for {n}x{n} matrix (nnz={self.A.nnz}, "
                f"min |diag|={diagonal.min() if n else 0.0:.3e}): {e}"
            ) from e

    def _raw_solve(self, b: np.ndarray) -> np.ndarray:
        return self.scale * self._lu.solve(self.scale * b)

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        b_norm = np.linalg.norm(b)
        if b_norm == 0.0:
            return np.zeros_like(b)
        x = self._raw_solve(b)
        for _ in range(REFINEMENT_STEPS):
            residual = b - self.A @ x
            ratio = np.linalg.norm(residual) / b_norm
            if ratio <= self.rtol:
                return x
            if not np.isfinite(ratio):
                break
            x = x + self._raw_solve(residual)
        ratio = np.linalg.norm(b - self.A @ x) / b_norm
        if not ratio <= self.rtol:
            raise SolverError(
                f"Linear solve residual {ratio:.3e} exceeds {self.rtol:.1e} "
                f"({self.A.shape[0]} unknowns, nnz={self.A.nnz})"
            )
        return x


def linear_solve(A: sp.spmatrix, b: np.ndarray, rtol: float = RESIDUAL_TOLERANCE) -> np.ndarray:
    """
    Solve A x = b with ||A x - b|| / ||b|| <= rtol.

    Raises:
        SolverError: singular matrix or residual above tolerance
    """
    return FactorizedSolver(A, rtol).solve(b)


class ConstrainedSolver:
    """
    Factorisation of A restricted to its free unknowns.

    Prescribed unknowns are eliminated symmetrically: their values move to
    the right-hand side through the free-fixed block of A.
    """

    def __init__(self, A: sp.spmatrix, fixed: Sequence[int], rtol: float = RESIDUAL_TOLERANCE):
        A = sp.csr_matrix(A)
        n = A.shape[0]
        self.n = n
        self.fixed = np.asarray(sorted(set(int(i) for i in fixed)), dtype=np.int64)
        free_mask = np.ones(n, dtype=bool)
        free_mask[self.fixed] = False
        self.free = np.flatnonzero(free_mask)
        self._free_fixed = A[self.free][:, self.fixed]
        self._solver = FactorizedSolver(A[self.free][:, self.free], rtol) if len(self.free) else None

    def solve(self, b: np.ndarray, fixed_values: Optional[np.ndarray] = None) -> np.ndarray:
        x = np.zeros(self.n)
        if fixed_values is not None and len(self.fixed):
            x[self.fixed] = fixed_values
        if self._solver is None:
            return x
        rhs = b[self.free] - self._free_fixed @ x[self.fixed]
        x[self.free] = self._solver.solve(rhs)
        return x


def _constraint_arrays(constraints: Dict[int, float]) -> Tuple[Tuple[int, ...], np.ndarray]:
    keys = tuple(sorted(constraints))
    return keys, np.array([constraints[k] for k in keys], dtype=float)


# ---- Flow ----

class FlowStepper:
    """
    Theta-scheme pressure update with a cached factorisation.

    p^{n+1} = [S + theta dt H]^{-1} {[S - (1 - theta) dt H] p^n + dt q - Q^T du}

    Injection raises pressure and compression (negative volumetric strain
    increment) raises pressure.
    """

    def __init__(self, system: FlowSystem, dt: float, theta: float):
        self.system = system
        self.dt = dt
        self.theta = theta
        self.lhs = (system.S + theta * dt * system.H).tocsr()
        self.explicit = (system.S - (1.0 - theta) * dt * system.H).tocsr()
        self._solver: Optional[ConstrainedSolver] = None
        self._solver_key: Optional[Tuple[int, ...]] = None

    def _solver_for(self, keys: Tuple[int, ...]) -> ConstrainedSolver:
        if self._solver is None or self._solver_key != keys:
            self._solver = ConstrainedSolver(self.lhs, keys)
            self._solver_key = keys
        return self._solver

    def step(
        self,
        p: np.ndarray,
        du: Optional[np.ndarray] = None,
        dirichlet: Optional[Dict[int, float]] = None,
    ) -> np.ndarray:
        rhs = self.explicit @ p + self.dt * self.system.rhs_source
        if du is not None:
            rhs -= self.system.Q.T @ np.ravel(du)
        constraints = self.system.dirichlet if dirichlet is None else dirichlet
        keys, values = _constraint_arrays(constraints)
        return self._solver_for(keys).solve(rhs, values)


def flow_step(
    state: SimState, system: FlowSystem, dt: float, theta: float
) -> np.ndarray:
    """One theta-scheme pressure update using the state's displacement increment."""
    return FlowStepper(system, dt, theta).step(state.p, state.u - state.u_prev)


# ---- Linear PD stiffness ----

def assemble_KPD(
    grid: NodeGrid,
    bonds: BondTable,
    material: SolidMaterial,
    mode: str = pd_solid.PLANE_STRAIN,
) -> sp.csr_matrix:
    """
    Linear PD stiffness K with K u = -F_int(u) * V, by unit-displacement probing.

    Nodes are coloured on the lattice so that the response regions (radius
    2 delta) of nodes sharing a colour never overlap; one force evaluation
    with the ``linear`` kinematics then yields the columns of every node of
    that colour.
    """
    n = grid.n_nodes
    reach = int(math.floor(2.0 * bonds.horizon / grid.spacing + 1e-9))
    stride = 2 * reach + 1
    col_index, row_index = np.arange(n) % (grid.nx + 1), np.arange(n) // (grid.nx + 1)

    def owner_index(index: np.ndarray, offset: int, limit: int) -> np.ndarray:
        remainder = (index - offset) % stride
        owner = np.where(remainder <= reach, index - remainder, index - remainder + stride)
        return np.where((owner >= 0) & (owner <= limit), owner, -1)

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    zero_p = np.zeros(n)
    for a in range(min(stride, grid.nx + 1)):
        owner_i = owner_index(col_index, a, grid.nx)
        for b in range(min(stride, grid.ny + 1)):
            owner_j = owner_index(row_index, b, grid.ny)
            probed = (col_index % stride == a) & (row_index % stride == b)
            valid = (owner_i >= 0) & (owner_j >= 0)
            owner = np.where(valid, owner_j * (grid.nx + 1) + owner_i, -1)
            for component in range(2):
                u = np.zeros((n, 2))
                u[probed, component] = 1.0
                force = pd_solid.internal_force(
                    bonds, grid.volumes, u, zero_p, material, kinematics="linear", mode=mode
                ) * grid.volumes[:, None]
                for c in range(2):
                    hit = valid & (force[:, c] != 0.0)
                    rows.append(2 * np.flatnonzero(hit) + c)
                    cols.append(2 * owner[hit] + component)
                    data.append(-force[hit, c])

    K = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(2 * n, 2 * n)
    ).tocsr()
    logger.info(f"Assembled K_PD by probing: {2 * n} dofs, nnz={K.nnz}, {2 * stride ** 2} colours")
    return K


# ---- Consolidation ----

class ConsolidationSolver:
    """
    Monolithic theta-scheme for the linear poro-elastic PD/FEM system.

    [theta K, -theta QPD; Q^T, S + theta dt H] (u, p)^{n+1}
      = [(theta - 1) K, (1 - theta) QPD; Q^T, S - (1 - theta) dt H] (u, p)^n + (f, dt q)

    Runs start from rest with ``start``: one backward-Euler step that
    carries the undrained jump of a suddenly applied load plus one step of
    drainage. Its dt H term keeps the equal-order pressure free of the
    checkerboard mode that a pure undrained solve shows on narrow columns.
    """

    def __init__(
        self,
        K: sp.spmatrix,
        QPD: sp.spmatrix,
        Q: sp.spmatrix,
        S: sp.spmatrix,
        H: sp.spmatrix,
        dt: float,
        theta: float,
        fixed: Optional[Dict[int, float]] = None,
    ):
        """
        Args:
            K, QPD: PD stiffness (2N x 2N) and pressure coupling (2N x N)
            Q, S, H: FE coupling, compressibility and permeability matrices
            dt, theta: Time step and integration parameter
            fixed: Prescribed unknowns in the stacked (u, p) numbering
        """
        self.n_u = K.shape[0]
        self.dt, self.theta = dt, theta
        QT = sp.csr_matrix(Q).T
        self.lhs = sp.bmat([[theta * K, -theta * QPD], [QT, S + theta * dt * H]]).tocsr()
        self.explicit = sp.bmat(
            [[(theta - 1.0) * K, (1.0 - theta) * QPD], [QT, S - (1.0 - theta) * dt * H]]
        ).tocsr()
        self.fixed = dict(fixed or {})
        keys, self._fixed_values = _constraint_arrays(self.fixed)
        self._solver = ConstrainedSolver(self.lhs, keys)
        if theta == 1.0:
            self._start_solver = self._solver
        else:
            implicit = sp.bmat([[K, -QPD], [QT, S + dt * H]]).tocsr()
            self._start_solver = ConstrainedSolver(implicit, keys)

    def start(self, f: np.ndarray, q: Optional[np.ndarray] = None) -> np.ndarray:
        """First step from rest under the load ``f``; returns the stacked (u, p) at t = dt."""
        source = np.zeros(self.lhs.shape[0] - self.n_u) if q is None else self.dt * q
        return self._start_solver.solve(np.concatenate([f, source]), self._fixed_values)

    def step(self, z: np.ndarray, f: np.ndarray, q: Optional[np.ndarray] = None) -> np.ndarray:
        source = np.zeros(self.lhs.shape[0] - self.n_u) if q is None else self.dt * q
        rhs = self.explicit @ z + np.concatenate([f, source])
        return self._solver.solve(rhs, self._fixed_values)


def consolidation_step(
    state: SimState,
    K: sp.spmatrix,
    QPD: sp.spmatrix,
    Q: sp.spmatrix,
    S: sp.spmatrix,
    H: sp.spmatrix,
    dt: float,
    theta: float,
    f: np.ndarray,
    q: Optional[np.ndarray] = None,
    fixed: Optional[Dict[int, float]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Advance (u, p) by one step of the block scheme; returns (u (N, 2), p (N,))."""
    solver = ConsolidationSolver(K, QPD, Q, S, H, dt, theta, fixed)
    z = solver.step(np.concatenate([state.u.ravel(), state.p]), np.ravel(f), q)
    n_u = solver.n_u
    return z[:n_u].reshape(-1, 2), z[n_u:]


# ---- Adaptive dynamic relaxation ----

@dataclass
class ADRResult:
    u: np.ndarray
    iterations: int
    residual: float
    history: List[float] = field(default_factory=list)
    velocity: Optional[np.ndarray] = None  # (N, 2) fictitious velocity at exit


def adr_mass(K: sp.spmatrix, safety: float = ADR_MASS_SAFETY) -> np.ndarray:
    """Fictitious diagonal mass from the Gershgorin row sums of K (dt = 1)."""
    row_sums = np.asarray(abs(sp.csr_matrix(K)).sum(axis=1)).ravel()
    return safety * 0.25 * np.where(row_sums > 0, row_sums, 1.0)


class AdaptiveDynamicRelaxation:
    """
    Quasi-static PD solve by adaptive dynamic relaxation.

    Central differences with unit fictitious time step, diagonal mass from
    ``adr_mass`` and a damping coefficient re-estimated every iteration from
    the Rayleigh quotient of the local diagonal stiffness.
    """

    def __init__(
        self,
        bonds: BondTable,
        volumes: np.ndarray,
        material: SolidMaterial,
        mass: np.ndarray,
        fixed: Optional[Dict[int, float]] = None,
        tolerance: float = 1e-6,
        max_iterations: int = 20000,
        kinematics: str = "finite",
    ):
        self.bonds = bonds
        self.volumes = volumes
        self.material = material
        self.mass = mass
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.kinematics = kinematics
        keys, values = _constraint_arrays(fixed or {})
        self.fixed_dofs = np.asarray(keys, dtype=np.int64)
        self.fixed_values = values

    def _forces(self, u: np.ndarray, p: np.ndarray, biot, external: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return (residual force, pressure force) as flat dof vectors."""
        shaped = u.reshape(-1, 2)
        state = pd_solid.bond_kinematics(self.bonds, shaped, self.kinematics)
        effective = pd_solid.effective_force(
            self.bonds, self.volumes, shaped, self.material, self.kinematics, state=state
        )
        pressure = np.zeros_like(effective)
        if np.any(p):
            pressure = pd_solid.pore_pressure_force(
                self.bonds, self.volumes, shaped, p, biot, self.kinematics, direction=state[1]
            )
        volumes = self.volumes[:, None]
        residual = ((effective + pressure) * volumes).ravel() + external
        load = (pressure * volumes).ravel() + external
        residual[self.fixed_dofs] = 0.0
        load[self.fixed_dofs] = 0.0
        return residual, load

    def solve(
        self,
        u0: np.ndarray,
        p: np.ndarray,
        biot=1.0,
        external: Optional[np.ndarray] = None,
        v0: Optional[np.ndarray] = None,
    ) -> ADRResult:
        """
        Relax from ``u0`` to equilibrium under the fixed pressure ``p``.

        ``v0`` continues the fictitious motion of a previous solve; the
        first half step from rest is added to it.

        Raises:
            ConvergenceError: residual ratio above tolerance after max_iterations
        """
        u = np.array(u0, dtype=float).ravel()
        u[self.fixed_dofs] = self.fixed_values
        external = np.zeros_like(u) if external is None else np.ravel(external).astype(float)

        start = np.zeros_like(u) if v0 is None else np.array(v0, dtype=float).ravel()
        start[self.fixed_dofs] = 0.0

        def result(iterations: int, residual: float, history: List[float], velocity: np.ndarray) -> ADRResult:
            return ADRResult(
                u=u.reshape(-1, 2), iterations=iterations, residual=residual,
                history=history, velocity=velocity.reshape(-1, 2),
            )

        force, load = self._forces(u, p, biot, external)
        reference = np.linalg.norm(load)
        residual_norm = np.linalg.norm(force)
        if reference == 0.0:
            if residual_norm == 0.0:
                return result(1, 0.0, [0.0], start)
            reference = residual_norm
        ratio = residual_norm / reference
        history = [ratio]
        if ratio <= self.tolerance:
            return result(1, ratio, history, start)

        velocity = start + 0.5 * force / self.mass
        velocity[self.fixed_dofs] = 0.0
        previous = force
        for iteration in range(2, self.max_iterations + 1):
            u += velocity
            force, _ = self._forces(u, p, biot, external)
            ratio = np.linalg.norm(force) / reference
            history.append(ratio)
            if ratio <= self.tolerance:
                logger.debug(f"ADR converged in {iteration} iterations (residual {ratio:.2e})")
                return result(iteration, ratio, history, velocity)
            if not np.isfinite(ratio):
                break
            if iteration % ADR_LOG_EVERY == 0:
                logger.debug(f"ADR iteration {iteration}: residual {ratio:.3e}")

            moving = velocity != 0.0
            local_stiffness = np.zeros_like(u)
            local_stiffness[moving] = -(force[moving] - previous[moving]) / (self.mass[moving] * velocity[moving])
            numerator = u @ (local_stiffness * u)
            denominator = u @ u
            damping = 0.0
            if numerator > 0.0 and denominator > 0.0:
                damping = min(2.0 * math.sqrt(numerator / denominator), ADR_MAX_DAMPING)

            velocity = ((2.0 - damping) * velocity + 2.0 * force / self.mass) / (2.0 + damping)
            velocity[self.fixed_dofs] = 0.0
            previous = force

        logger.error(f"ADR failed: residual {ratio:.3e} after {len(history)} iterations")
        raise ConvergenceError(
            f"ADR did not converge: residual {ratio:.3e} > {self.tolerance:.1e} "
            f"after {len(history)} iterations",
            iterations=len(history),
            residual=float(ratio),
        )


def adr_solve(
    bonds: BondTable,
    volumes: np.ndarray,
    material: SolidMaterial,
    u0: np.ndarray,
    p: np.ndarray,
    mass: np.ndarray,
    biot=1.0,
    external: Optional[np.ndarray] = None,
    fixed: Optional[Dict[int, float]] = None,
    tolerance: float = 1e-6,
    max_iterations: int = 20000,
) -> ADRResult:
    """Functional form of ``AdaptiveDynamicRelaxation.solve``."""
    relaxation = AdaptiveDynamicRelaxation(
        bonds, volumes, material, mass, fixed, tolerance, max_iterations
    )
    return relaxation.solve(u0, p, biot, external)


# ---- Staggered hydraulic-fracture loop ----

@dataclass
class StaggeredProblem:
    """Static description of a coupled fracture run."""

    grid: NodeGrid
    bonds: BondTable
    mesh: FluidMesh
    solid: SolidMaterial
    flow: FlowMaterial
    coupling: CouplingSettings
    scheme: TimeScheme
    critical_stretch: float
    fixed_dofs: Dict[int, float] = field(default_factory=dict)
    external_force: Optional[np.ndarray] = None  # flat (2N,) nodal forces [N]
    pressure_bcs: Dict[int, float] = field(default_factory=dict)
    sources: List[Tuple[int, float]] = field(default_factory=list)
    probe_node: int = 0
    crack_face_pressure: Optional[Callable[[int], float]] = None
    flow_enabled: bool = True


class StaggeredSolver:
    """
    Sequential flow / solid solution per outer step.

    Each step: (1) pressure update with the current S, H and the lagged
    displacement increment, (2) ADR for u under the new pressure,
    (3) bond failure, (4) aperture, domain classification and flow
    property update, (5) output row.
    """

    def __init__(self, problem: StaggeredProblem, mass: Optional[np.ndarray] = None):
        self.problem = problem
        grid, bonds = problem.grid, problem.bonds
        self.templates = fem_flow.element_templates(problem.mesh)
        self.state = SimState.zeros(grid.n_nodes)
        self.phi = pd_solid.damage(bonds, grid.volumes)
        self.aperture = np.zeros(grid.n_nodes)
        self.refresh_flow()

        if mass is None:
            mass = adr_mass(assemble_KPD(grid, bonds, problem.solid))
        self.relaxation = AdaptiveDynamicRelaxation(
            bonds,
            grid.volumes,
            problem.solid,
            mass,
            fixed=problem.fixed_dofs,
            tolerance=problem.scheme.adr_tolerance,
            max_iterations=problem.scheme.adr_max_iterations,
            kinematics=problem.coupling.kinematics,
        )
        self.total_broken = 0
        self.on_abort: Optional[Callable[["StaggeredSolver"], None]] = None

    @property
    def family_radius(self) -> Optional[float]:
        ratio = self.problem.coupling.aperture_family_ratio
        return None if ratio is None else ratio * self.problem.grid.spacing

    def refresh_flow(self) -> None:
        problem = self.problem
        self.indicators, self.props, operators = fracture_coupling.update_flow_properties(
            problem.mesh, self.phi, self.aperture, problem.flow, problem.coupling, self.templates
        )
        system = FlowSystem(
            S=operators.S,
            H=operators.H,
            Q=operators.Q,
            q=np.zeros(problem.grid.n_nodes),
            gravity=operators.gravity,
        )
        self.system = fem_flow.apply_flow_bcs(system, problem.pressure_bcs.items(), problem.sources)
        self.stepper = FlowStepper(self.system, problem.scheme.dt, problem.scheme.theta)

    def _pressure_constraints(self, step: int) -> Tuple[Dict[int, float], np.ndarray]:
        """Dirichlet set for this step and the crack-face pressure field (zero if unused)."""
        constraints = dict(self.problem.pressure_bcs)
        face_field = np.zeros(self.problem.grid.n_nodes)
        if self.problem.crack_face_pressure is not None:
            pressure = self.problem.crack_face_pressure(step)
            face_field = pressure * self.indicators.fracture
            for node in np.flatnonzero(self.indicators.fracture > 0.0):
                constraints[int(node)] = float(face_field[node])
        return constraints, face_field

    def update_pressure(self, step: int) -> np.ndarray:
        constraints, face_field = self._pressure_constraints(step)
        state = self.state
        if not self.problem.flow_enabled:
            p = face_field.copy()
            for node, value in self.problem.pressure_bcs.items():
                p[node] = value
            return p
        p = state.p
        du = state.u - state.u_prev
        for substep in range(self.problem.scheme.substeps):
            p = self.stepper.step(p, du if substep == 0 else None, constraints)
        return p

    def step(self) -> TimeSeriesRow:
        problem = self.problem
        state = self.state
        step = state.step + 1

        p = self.update_pressure(step)
        try:
            result = self.relaxation.solve(state.u, p, self.props.biot, problem.external_force, v0=state.v)
        except ConvergenceError:
            logger.error(f"Step {step}: solid solve diverged")
            if self.on_abort is not None:
                self.on_abort(self)
            raise

        broken, self.phi = pd_solid.update_failure(
            problem.bonds, problem.grid.volumes, result.u, problem.critical_stretch
        )
        self.total_broken += broken
        self.aperture = fracture_coupling.compute_aperture(
            problem.bonds, result.u, problem.critical_stretch, self.family_radius
        )
        if broken or np.any(self.indicators.fracture > 0.0):
            self.refresh_flow()

        state.u_prev = state.u
        state.u = result.u
        state.v = result.velocity
        state.p = p
        state.t += problem.scheme.outer_dt
        state.step = step
        if broken:
            logger.info(f"Step {step}: {broken} bonds broke (total {self.total_broken})")
        return self.record(broken)

    def crack_length(self) -> float:
        """dx times the number of fracture-domain nodes over two crack faces."""
        n_fracture = np.count_nonzero(self.phi >= self.problem.coupling.c2)
        return 0.5 * n_fracture * self.problem.grid.spacing

    def record(self, broken: int = 0) -> TimeSeriesRow:
        node = self.problem.probe_node
        return TimeSeriesRow(
            step=self.state.step,
            time=self.state.t,
            injection_pressure=float(self.state.p[node]),
            crack_length=self.crack_length(),
            cmod=float(self.aperture[node]),
            broken_bonds=broken,
        )


def staggered_hf_loop(
    solver: StaggeredSolver,
    n_steps: int,
    on_step: Optional[Callable[[StaggeredSolver, TimeSeriesRow], None]] = None,
    stop: Optional[Callable[[StaggeredSolver, TimeSeriesRow], bool]] = None,
    record: Optional[OutputRecord] = None,
) -> OutputRecord:
    """
    Run up to ``n_steps`` outer steps and collect the time series.

    Args:
        solver: Initialised staggered solver
        n_steps: Number of outer steps
        on_step: Called after every step (snapshots, progress)
        stop: Ends the loop early when it returns True
        record: Record to append to (default: a new, unnamed one)
    """
    record = record if record is not None else OutputRecord(scenario="")
    for _ in range(n_steps):
        row = solver.step()
        record.rows.append(row)
        if on_step is not None:
            on_step(solver, row)
        if stop is not None and stop(solver, row):
            break
    record.final_state = solver.state
    record.damage = solver.phi
    record.aperture = solver.aperture
    return record
