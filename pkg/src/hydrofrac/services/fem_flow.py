"""
Finite-element discretisation of the Biot flow equation.

Every element is an axis-aligned square of side dx, so the element matrices
are a fixed template (integrated once with 2x2 Gauss quadrature) scaled by a
per-element property, and global assembly is a single COO build.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..exceptions import ConfigurationError
from ..models import FluidMesh

logger = logging.getLogger(__name__)

# Natural-domain corner of each shape function, in the printed order N1..N4
NATURAL_CORNERS = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]])

# Position of the counter-clockwise element nodes (00, 10, 11, 01) in N1..N4
CCW_FROM_NATURAL = np.array([0, 3, 2, 1])


def shape_functions(xi: float, eta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bilinear shape functions at a natural-domain point.

    N1 = (1-xi)(1-eta)/4, N2 = (1-xi)(1+eta)/4, N3 = (1+xi)(1+eta)/4,
    N4 = (1+xi)(1-eta)/4.

    Args:
        xi, eta: Natural coordinates in [-1, 1]

    Returns:
        (N with shape (4,), dN/d(xi, eta) with shape (4, 2))
    """
    if abs(xi) > 1.0 + 1e-12 or abs(eta) > 1.0 + 1e-12:
        raise ValueError(f"Natural coordinates ({xi}, {eta}) outside [-1, 1]^2")
    sx, sy = NATURAL_CORNERS[:, 0], NATURAL_CORNERS[:, 1]
    values = 0.25 * (1.0 + sx * xi) * (1.0 + sy * eta)
    gradients = 0.25 * np.column_stack([sx * (1.0 + sy * eta), sy * (1.0 + sx * xi)])
    return values, gradients


def map_to_element(mesh: FluidMesh, positions: np.ndarray, element: int, xi: float, eta: float) -> np.ndarray:
    """Physical coordinates of a natural-domain point of ``element``."""
    values, _ = shape_functions(xi, eta)
    corners = positions[mesh.elements[element]]
    return values[CCW_FROM_NATURAL] @ corners


@dataclass
class ElementTemplates:
    """Unit-property element matrices in counter-clockwise node order."""

    mass: np.ndarray  # (4, 4): int N^T N
    laplacian: np.ndarray  # (4, 4): int grad N^T grad N
    coupling: np.ndarray  # (8, 4): int dN_a/dx_c N_b, rows 2a + c
    gradient: np.ndarray  # (4, 2): int dN_a/dx_c


def element_templates(mesh: FluidMesh) -> ElementTemplates:
    """Integrate the square-element templates with the mesh's Gauss rule (thickness included)."""
    h = mesh.spacing
    jacobian_det = (0.5 * h) ** 2
    if not jacobian_det > 0:
        raise ConfigurationError(f"Degenerate element of side {h}")
    scale = jacobian_det * mesh.thickness

    mass = np.zeros((4, 4))
    laplacian = np.zeros((4, 4))
    coupling = np.zeros((8, 4))
    gradient = np.zeros((4, 2))
    for (xi, eta), weight in zip(mesh.gauss_points, mesh.gauss_weights):
        values, natural_gradients = shape_functions(xi, eta)
        values = values[CCW_FROM_NATURAL]
        grads = natural_gradients[CCW_FROM_NATURAL] * (2.0 / h)
        mass += weight * scale * np.outer(values, values)
        laplacian += weight * scale * grads @ grads.T
        coupling += weight * scale * np.einsum("ac,b->acb", grads, values).reshape(8, 4)
        gradient += weight * scale * grads
    return ElementTemplates(mass=mass, laplacian=laplacian, coupling=coupling, gradient=gradient)


def _assemble(
    row_ids: np.ndarray, col_ids: np.ndarray, template: np.ndarray, coefficients: np.ndarray, shape: Tuple[int, int]
) -> sp.csr_matrix:
    """Scatter ``coefficients[e] * template`` for every element into a CSR matrix."""
    n_rows, n_cols = template.shape
    rows = np.repeat(row_ids[:, :, None], n_cols, axis=2)
    cols = np.repeat(col_ids[:, None, :], n_rows, axis=1)
    data = coefficients[:, None, None] * template[None, :, :]
    return sp.coo_matrix((data.ravel(), (rows.ravel(), cols.ravel())), shape=shape).tocsr()


def _per_element(mesh: FluidMesh, values, name: str) -> np.ndarray:
    array = np.broadcast_to(np.asarray(values, dtype=float), (mesh.n_elements,))
    if not np.all(np.isfinite(array)):
        raise ConfigurationError(f"Non-finite element {name}")
    return array


def _n_nodes(mesh: FluidMesh) -> int:
    return int(mesh.elements.max()) + 1


def assemble_S(mesh: FluidMesh, storage, templates: Optional[ElementTemplates] = None) -> sp.csr_matrix:
    """Compressibility matrix S = int N^T s N dOmega."""
    templates = templates or element_templates(mesh)
    storage = _per_element(mesh, storage, "storage")
    if np.any(storage < 0):
        raise ConfigurationError("Negative storage coefficient")
    n = _n_nodes(mesh)
    return _assemble(mesh.elements, mesh.elements, templates.mass, storage, (n, n))


def assemble_H(mesh: FluidMesh, mobility, templates: Optional[ElementTemplates] = None) -> sp.csr_matrix:
    """Permeability matrix H = int grad(N)^T (k / mu_w) grad(N) dOmega."""
    templates = templates or element_templates(mesh)
    mobility = _per_element(mesh, mobility, "mobility")
    if np.any(mobility < 0):
        raise ConfigurationError("Negative permeability")
    n = _n_nodes(mesh)
    return _assemble(mesh.elements, mesh.elements, templates.laplacian, mobility, (n, n))


def assemble_Q(mesh: FluidMesh, biot, templates: Optional[ElementTemplates] = None) -> sp.csr_matrix:
    """
    Coupling matrix Q = int (L N_u)^T alpha m N_p dOmega, shape (2n, n).

    ``Q @ p`` gives equivalent nodal forces of a pressure field and
    ``Q.T @ du`` the volumetric-strain increment seen by the flow equation.
    """
    templates = templates or element_templates(mesh)
    biot = _per_element(mesh, biot, "Biot coefficient")
    n = _n_nodes(mesh)
    dof_ids = np.stack([2 * mesh.elements, 2 * mesh.elements + 1], axis=2).reshape(-1, 8)
    return _assemble(dof_ids, mesh.elements, templates.coupling, biot, (2 * n, n))


def assemble_gravity(
    mesh: FluidMesh, mobility, density, gravity, templates: Optional[ElementTemplates] = None
) -> np.ndarray:
    """Body-force flux vector int grad(N)^T (k / mu_w) rho_f g dOmega."""
    n = _n_nodes(mesh)
    g = np.asarray(gravity, dtype=float)
    if not np.any(g):
        return np.zeros(n)
    templates = templates or element_templates(mesh)
    coefficient = _per_element(mesh, mobility, "mobility") * _per_element(mesh, density, "density")
    local = coefficient[:, None] * (templates.gradient @ g)[None, :]
    return np.bincount(mesh.elements.ravel(), weights=local.ravel(), minlength=n)


@dataclass
class FlowSystem:
    """Assembled flow operators with sources and pressure constraints."""

    S: sp.csr_matrix
    H: sp.csr_matrix
    Q: sp.csr_matrix
    q: np.ndarray
    gravity: Optional[np.ndarray] = None
    dirichlet: Dict[int, float] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.S.shape[0]

    @property
    def rhs_source(self) -> np.ndarray:
        if self.gravity is None:
            return self.q
        return self.q + self.gravity


def apply_flow_bcs(
    system: FlowSystem,
    dirichlet: Iterable[Tuple[int, float]] = (),
    sources: Iterable[Tuple[int, float]] = (),
) -> FlowSystem:
    """
    Attach pressure constraints and point sources to a flow system.

    Rates enter q as given and are not divided by the thickness: S, H and Q
    already carry it, so q is the rate through the whole slab.

    Args:
        system: Assembled system (not modified)
        dirichlet: (node, pressure) pairs; duplicates must agree
        sources: (node, volumetric rate [m^3/s]) pairs, summed per node

    Returns:
        New FlowSystem; the constraints are eliminated symmetrically at solve time
    """
    n = system.n_nodes
    constraints: Dict[int, float] = dict(system.dirichlet)
    for node, value in dirichlet:
        node = int(node)
        if not 0 <= node < n:
            raise ConfigurationError(f"Pressure constraint on unknown node {node}")
        if node in constraints and constraints[node] != float(value):
            raise ConfigurationError(
                f"Conflicting pressure constraints on node {node}: {constraints[node]} vs {value}"
            )
        constraints[node] = float(value)

    q = system.q.copy()
    for node, rate in sources:
        node = int(node)
        if not 0 <= node < n:
            raise ConfigurationError(f"Source on unknown node {node}")
        q[node] += rate
    return replace(system, q=q, dirichlet=constraints)
