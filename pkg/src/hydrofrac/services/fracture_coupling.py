"""
Bridge from PD damage and deformation to flow properties.

Classifies nodes into reservoir / transition / fracture domains, measures
crack apertures from broken bonds, blends flow properties (cubic law in the
fracture domain) and assembles the PD-side pressure coupling operator.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..exceptions import ConfigurationError
from ..models import (
    BondTable,
    CouplingSettings,
    DomainIndicators,
    FlowMaterial,
    FlowProperties,
    FluidMesh,
)
from . import fem_flow
from .pd_solid import PLANE_STRAIN, bond_kinematics, dilatation_factor, pressure_bonds

logger = logging.getLogger(__name__)

FRACTURE_BIOT = 1.0
FRACTURE_POROSITY = 1.0


def classify_domains(phi: np.ndarray, c1: float = 0.2, c2: float = 0.35) -> DomainIndicators:
    """chi_r = (c2 - phi) / (c2 - c1) clamped to [0, 1]; chi_f = 1 - chi_r."""
    if not 0.0 <= c1 < c2 <= 1.0:
        raise ConfigurationError(f"Damage thresholds must satisfy 0 <= c1 < c2 <= 1, got {c1}, {c2}")
    reservoir = np.clip((c2 - np.asarray(phi, dtype=float)) / (c2 - c1), 0.0, 1.0)
    return DomainIndicators(c1=c1, c2=c2, reservoir=reservoir, fracture=1.0 - reservoir)


def cubic_law(aperture):
    """Fracture permeability k_f = a^2 / 12."""
    return np.asarray(aperture, dtype=float) ** 2 / 12.0


def compute_aperture(
    bonds: BondTable,
    u: np.ndarray,
    s_c: float,
    family_radius: Optional[float] = None,
) -> np.ndarray:
    """
    Nodal crack aperture from broken, opening bonds.

    For each broken bond with stretch >= s_c the opening is the deformed
    bond projected on its reference direction minus its reference length;
    the nodal aperture is the mean over bonds with non-negative opening and
    zero when there are none.

    Args:
        bonds: Bond table with current intact flags
        u: Nodal displacements (N, 2)
        s_c: Critical stretch
        family_radius: Only bonds up to this length count (None: full horizon)

    Returns:
        Aperture per node [m]
    """
    eta = u[bonds.second] - u[bonds.first]
    unit = bonds.xi / bonds.length[:, None]
    opening = np.einsum("ij,ij->i", unit, eta)
    deformed = bonds.xi + eta
    stretch = (np.hypot(deformed[:, 0], deformed[:, 1]) - bonds.length) / bonds.length

    qualifies = (~bonds.intact) & (stretch >= s_c) & (opening >= 0.0)
    if family_radius is not None:
        qualifies &= bonds.length <= family_radius * (1.0 + 1e-12)

    n = bonds.n_nodes
    count = np.bincount(bonds.first, weights=qualifies.astype(float), minlength=n)
    total = np.bincount(bonds.first, weights=opening * qualifies, minlength=n)
    return np.where(count > 0, total / np.maximum(count, 1.0), 0.0)


def interpolate_properties(
    indicators: DomainIndicators, flow: FlowMaterial, aperture: np.ndarray
) -> FlowProperties:
    """
    Blend reservoir and fracture flow properties node by node.

    The fracture domain uses alpha = 1, n = 1, s = 1 / K_w and the cubic-law
    permeability, never below the reservoir value. The volumetric coupling
    coefficient is dropped where chi_f = 1.
    """
    chi_r, chi_f = indicators.reservoir, indicators.fracture
    fracture_permeability = np.maximum(cubic_law(aperture), flow.permeability)

    biot = flow.biot * chi_r + FRACTURE_BIOT * chi_f
    return FlowProperties(
        density=np.full_like(chi_r, flow.fluid_density),
        biot=biot,
        porosity=flow.porosity * chi_r + FRACTURE_POROSITY * chi_f,
        permeability=flow.permeability * chi_r + fracture_permeability * chi_f,
        storage=flow.storage_coefficient * chi_r + flow.fracture_storage * chi_f,
        coupling_biot=np.where(chi_f >= 1.0, 0.0, biot),
    )


@dataclass
class FlowOperators:
    """Flow matrices rebuilt from the current property set."""

    S: sp.csr_matrix
    H: sp.csr_matrix
    Q: sp.csr_matrix
    gravity: np.ndarray


def update_flow_properties(
    mesh: FluidMesh,
    phi: np.ndarray,
    aperture: np.ndarray,
    flow: FlowMaterial,
    coupling: CouplingSettings,
    templates: Optional[fem_flow.ElementTemplates] = None,
) -> Tuple[DomainIndicators, FlowProperties, FlowOperators]:
    """
    Reclassify domains and rebuild S, H, Q from the blended properties.

    Element properties are the mean of the four nodal values.
    """
    indicators = classify_domains(phi, coupling.c1, coupling.c2)
    if coupling.prescribed_aperture is not None:
        aperture = np.where(indicators.fracture > 0.0, coupling.prescribed_aperture, 0.0)
    props = interpolate_properties(indicators, flow, aperture)

    templates = templates or fem_flow.element_templates(mesh)
    elements = mesh.elements
    mobility = props.element_values(elements, "permeability") / flow.viscosity
    operators = FlowOperators(
        S=fem_flow.assemble_S(mesh, props.element_values(elements, "storage"), templates),
        H=fem_flow.assemble_H(mesh, mobility, templates),
        Q=fem_flow.assemble_Q(mesh, props.element_values(elements, "coupling_biot"), templates),
        gravity=fem_flow.assemble_gravity(
            mesh, mobility, props.element_values(elements, "density"), flow.gravity, templates
        ),
    )
    n_fracture = len(indicators.fracture_nodes())
    if n_fracture:
        logger.debug(f"Flow properties updated: {n_fracture} fracture-domain nodes")
    return indicators, props, operators


def assemble_QPD(
    bonds: BondTable,
    volumes: np.ndarray,
    biot,
    u: Optional[np.ndarray] = None,
    kinematics: str = "finite",
    mode: str = PLANE_STRAIN,
) -> sp.csr_matrix:
    """
    PD pressure coupling operator of shape (2N, N).

    ``assemble_QPD(...) @ p`` equals the pore-pressure force density times
    nodal volume, i.e. the nodal forces of the pressure field.
    """
    n = bonds.n_nodes
    if u is None:
        u = np.zeros((n, 2))
    _, direction = bond_kinematics(bonds, u, kinematics)
    alpha = np.broadcast_to(np.asarray(biot, dtype=float), (n,))

    base = (
        -dilatation_factor(mode)
        * pressure_bonds(bonds)
        * bonds.length
        * volumes[bonds.second]
        * volumes[bonds.first]
    )
    own = base * alpha[bonds.first] / bonds.unit_weighted_volume[bonds.first]
    other = base * alpha[bonds.second] / bonds.unit_weighted_volume[bonds.second]

    rows = np.concatenate([
        2 * bonds.first, 2 * bonds.first + 1, 2 * bonds.first, 2 * bonds.first + 1,
    ])
    cols = np.concatenate([bonds.first, bonds.first, bonds.second, bonds.second])
    data = np.concatenate([
        own * direction[:, 0], own * direction[:, 1],
        other * direction[:, 0], other * direction[:, 1],
    ])
    return sp.coo_matrix((data, (rows, cols)), shape=(2 * n, n)).tocsr()
