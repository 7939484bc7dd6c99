"""
Ordinary state-based peridynamic mechanics.

All kernels are vectorised over the directed bond table: per-bond
quantities are computed as arrays and reduced onto nodes with ordered
``np.bincount`` sums, which keeps every evaluation bit-reproducible.

Force densities are returned in N/m^3; multiply by nodal volume for
nodal forces.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from ..exceptions import ConfigurationError, SolverError
from ..models import BondTable, SolidMaterial

logger = logging.getLogger(__name__)

PLANE_STRAIN = "plane-strain"
THREE_D = "3d"
MODES = (PLANE_STRAIN, THREE_D)
KINEMATICS = ("finite", "linear")

# Deformed bonds shorter than this fraction of the horizon are singular
ZERO_LENGTH = 1e-14

ArrayLike = Union[float, np.ndarray]


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ConfigurationError(f"Unknown PD mode '{mode}', expected one of {MODES}")


def critical_stretch(material: SolidMaterial, horizon: float, mode: str = PLANE_STRAIN) -> float:
    """
    Critical bond stretch calibrated from the fracture energy.

    Plane strain: sqrt(5 G_c / (12 E delta)); 3D: sqrt(5 G_c / (6 E delta)).
    """
    _check_mode(mode)
    g_c, young = material.fracture_energy, material.youngs_modulus
    if g_c <= 0 or young <= 0 or horizon <= 0:
        raise ConfigurationError(
            f"critical stretch needs positive G_c, E and horizon (got {g_c}, {young}, {horizon})"
        )
    denominator = 12.0 if mode == PLANE_STRAIN else 6.0
    return float(np.sqrt(5.0 * g_c / (denominator * young * horizon)))


def dilatation_factor(mode: str = PLANE_STRAIN) -> float:
    _check_mode(mode)
    return 2.0 if mode == PLANE_STRAIN else 3.0


def force_coefficients(material: SolidMaterial, mode: str = PLANE_STRAIN) -> Tuple[float, float]:
    """Return the (dilatational, deviatoric) coefficients of the force scalar state."""
    _check_mode(mode)
    kappa, mu = material.bulk_modulus, material.shear_modulus
    if mode == PLANE_STRAIN:
        return 2.0 * (kappa - mu / 3.0), 8.0 * mu
    return 3.0 * kappa, 15.0 * mu


def force_density_scalar(
    extension: ArrayLike,
    length: ArrayLike,
    weight: ArrayLike,
    theta: ArrayLike,
    weighted_volume: ArrayLike,
    material: SolidMaterial,
    mode: str = PLANE_STRAIN,
) -> ArrayLike:
    """
    Effective force scalar state t of a bond seen from its first node.

    Args:
        extension: Bond extension e [m]
        length: Reference bond length |xi| [m]
        weight: Influence w
        theta: Dilatation of the first node
        weighted_volume: Weighted volume m of the first node
        material: Solid material
        mode: "plane-strain" or "3d"

    Returns:
        t = a theta w x / m + b e_d w / m with e_d = e - theta x / 3
    """
    dilatational, deviatoric = force_coefficients(material, mode)
    deviatoric_extension = extension - theta * length / 3.0
    return (
        dilatational * theta * weight * length / weighted_volume
        + deviatoric * deviatoric_extension * weight / weighted_volume
    )


def bond_kinematics(
    bonds: BondTable, u: np.ndarray, kinematics: str = "finite"
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Extension scalar and deformed unit direction of every bond.

    ``finite`` uses the deformed length and direction; ``linear`` the
    small-deformation projection onto the reference direction.
    """
    eta = u[bonds.second] - u[bonds.first]
    if kinematics == "linear":
        direction = bonds.xi / bonds.length[:, None]
        extension = np.einsum("ij,ij->i", direction, eta)
        return extension, direction
    if kinematics != "finite":
        raise ConfigurationError(f"Unknown kinematics '{kinematics}', expected one of {KINEMATICS}")

    deformed = bonds.xi + eta
    deformed_length = np.hypot(deformed[:, 0], deformed[:, 1])
    if np.any(deformed_length < ZERO_LENGTH * bonds.horizon):
        collapsed = int(np.argmin(deformed_length))
        raise SolverError(
            f"Bond {bonds.first[collapsed]}-{bonds.second[collapsed]} collapsed to zero length"
        )
    return deformed_length - bonds.length, deformed / deformed_length[:, None]


def pressure_bonds(bonds: BondTable) -> np.ndarray:
    """
    Bonds carrying the pore-pressure coupling.

    Intact bonds, plus broken bonds between two nodes that keep at least one
    intact bond. A node cut loose from the solid feels no pressure force.
    """
    anchored = np.bincount(bonds.first, weights=bonds.intact.astype(float), minlength=bonds.n_nodes) > 0
    return bonds.intact | (anchored[bonds.first] & anchored[bonds.second])


def _accumulate(bonds: BondTable, values: np.ndarray) -> np.ndarray:
    """Sum per-bond 2-vectors onto the first node of each bond."""
    n = bonds.n_nodes
    return np.column_stack([
        np.bincount(bonds.first, weights=values[:, 0], minlength=n),
        np.bincount(bonds.first, weights=values[:, 1], minlength=n),
    ])


def dilatation(
    bonds: BondTable,
    volumes: np.ndarray,
    u: np.ndarray,
    kinematics: str = "finite",
    mode: str = PLANE_STRAIN,
    extension: Optional[np.ndarray] = None,
) -> np.ndarray:
    """theta_i = (2/m_i) sum_j rho_ij w_ij |xi_ij| e_ij V_j (factor 3 in 3D)."""
    if extension is None:
        extension, _ = bond_kinematics(bonds, u, kinematics)
    contributions = bonds.intact * bonds.weight * bonds.length * extension * volumes[bonds.second]
    summed = np.bincount(bonds.first, weights=contributions, minlength=bonds.n_nodes)
    return dilatation_factor(mode) * summed / bonds.weighted_volume


def effective_force(
    bonds: BondTable,
    volumes: np.ndarray,
    u: np.ndarray,
    material: SolidMaterial,
    kinematics: str = "finite",
    mode: str = PLANE_STRAIN,
    state: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """Force density from the effective (skeleton) force states."""
    extension, direction = state if state is not None else bond_kinematics(bonds, u, kinematics)
    theta = dilatation(bonds, volumes, u, mode=mode, extension=extension)
    t = force_density_scalar(
        extension,
        bonds.length,
        bonds.weight,
        theta[bonds.first],
        bonds.weighted_volume[bonds.first],
        material,
        mode,
    ) * bonds.intact
    # T_i<xi> - T_j<-xi> with M<-xi> = -M<xi>
    pair = (t + t[bonds.reverse]) * volumes[bonds.second]
    return _accumulate(bonds, pair[:, None] * direction)


def pore_pressure_force(
    bonds: BondTable,
    volumes: np.ndarray,
    u: np.ndarray,
    p: np.ndarray,
    biot: ArrayLike,
    kinematics: str = "finite",
    mode: str = PLANE_STRAIN,
    direction: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Force density of the pore-pressure part of the total force state.

    Uses w = 1 with the matching weighted volume sum |xi|^2 V, so that a
    pressure gradient acts as -alpha grad(p) in the bulk.

    Broken bonds keep this term (see ``pressure_bonds``): the fluid fills
    the crack, so a pressure inside a crack pushes its two faces apart.
    """
    if direction is None:
        _, direction = bond_kinematics(bonds, u, kinematics)
    scaled = np.broadcast_to(biot, p.shape) * p / bonds.unit_weighted_volume
    pair = (scaled[bonds.first] + scaled[bonds.second]) * pressure_bonds(bonds)
    pair = pair * bonds.length * volumes[bonds.second]
    return -dilatation_factor(mode) * _accumulate(bonds, pair[:, None] * direction)


def internal_force(
    bonds: BondTable,
    volumes: np.ndarray,
    u: np.ndarray,
    p: np.ndarray,
    material: SolidMaterial,
    biot: ArrayLike = 1.0,
    kinematics: str = "finite",
    mode: str = PLANE_STRAIN,
) -> np.ndarray:
    """Total internal force density (effective plus pore-pressure coupling) per node."""
    state = bond_kinematics(bonds, u, kinematics)
    force = effective_force(bonds, volumes, u, material, kinematics, mode, state=state)
    if np.any(p):
        force += pore_pressure_force(
            bonds, volumes, u, p, biot, kinematics, mode, direction=state[1]
        )
    return force


def bond_stretch(bonds: BondTable, u: np.ndarray) -> np.ndarray:
    """Stretch s = e / |xi| with the deformed bond length."""
    extension, _ = bond_kinematics(bonds, u, "finite")
    return extension / bonds.length


def damage(bonds: BondTable, volumes: np.ndarray) -> np.ndarray:
    """phi_i = 1 - sum w rho V / sum w V over the family of i."""
    weighted = bonds.weight * volumes[bonds.second]
    total = np.bincount(bonds.first, weights=weighted, minlength=bonds.n_nodes)
    intact = np.bincount(bonds.first, weights=weighted * bonds.intact, minlength=bonds.n_nodes)
    return np.clip(1.0 - intact / total, 0.0, 1.0)


def update_failure(
    bonds: BondTable, volumes: np.ndarray, u: np.ndarray, s_c: float
) -> Tuple[int, np.ndarray]:
    """
    Break every intact bond with stretch >= s_c and recompute damage.

    Broken bonds never heal; both directions of a bond break together.

    Returns:
        (number of bonds broken in this call, nodal damage)
    """
    if not s_c > 0:
        raise ConfigurationError(f"critical stretch must be positive, got {s_c}")
    broken = bonds.break_bonds(bond_stretch(bonds, u) >= s_c)
    if broken:
        logger.debug(f"Broke {broken} bonds")
    return broken, damage(bonds, volumes)
