"""
Shared uniform-grid discretisation.

Builds the PD node lattice with volumes and boundary groups, the directed
bond table inside the horizon and the coincident bilinear quad mesh used
for the flow field.
"""

import logging
from typing import Iterable

import numpy as np
from scipy.spatial import cKDTree

from ..exceptions import ConfigurationError
from ..models import BondTable, CrackSegment, FluidMesh, GridConfig, NodeGrid

logger = logging.getLogger(__name__)

# Relative slack on the horizon so lattice ties (|xi| == delta) are included
HORIZON_TOLERANCE = 1e-12

GAUSS_POINT = 1.0 / np.sqrt(3.0)


def build_grid(config: GridConfig) -> NodeGrid:
    """
    Build the node lattice at cell corners.

    Args:
        config: Grid configuration (validated here)

    Returns:
        NodeGrid with "left", "right", "bottom", "top" and "all" node groups
    """
    config.validate()
    nx, ny = config.nx, config.ny
    dx = config.spacing

    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    ii, jj = ii.ravel(), jj.ravel()
    positions = np.column_stack([ii * dx, jj * dx]).astype(float)

    volumes = np.full(len(positions), dx * dx * config.thickness)
    if config.partial_boundary_volumes:
        volumes *= np.where((ii == 0) | (ii == nx), 0.5, 1.0)
        volumes *= np.where((jj == 0) | (jj == ny), 0.5, 1.0)

    grid = NodeGrid(
        positions=positions,
        volumes=volumes,
        nx=nx,
        ny=ny,
        spacing=dx,
        thickness=config.thickness,
    )
    grid.boundary_groups = {
        "left": grid.column(0),
        "right": grid.column(nx),
        "bottom": grid.row(0),
        "top": grid.row(ny),
        "all": np.arange(grid.n_nodes),
    }
    logger.info(f"Built grid: {nx + 1} x {ny + 1} nodes, dx={dx}")
    return grid


def build_bonds(grid: NodeGrid, horizon: float, influence: str = "gaussian") -> BondTable:
    """
    Build the directed bond table of all node pairs within ``horizon``.

    Args:
        grid: Node lattice
        horizon: PD horizon delta [m]
        influence: "gaussian" for w = exp(-|xi|^2 / delta^2), "unit" for w = 1

    Returns:
        BondTable with every bond intact
    """
    if influence not in ("gaussian", "unit"):
        raise ConfigurationError(f"Unknown influence function: {influence}")

    tree = cKDTree(grid.positions)
    pairs = tree.query_pairs(r=horizon * (1.0 + HORIZON_TOLERANCE), output_type="ndarray")
    n_pairs = len(pairs)

    first = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.int64)
    second = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.int64)
    opposite = np.concatenate([np.arange(n_pairs) + n_pairs, np.arange(n_pairs)])

    order = np.lexsort((second, first))
    position_of = np.empty_like(order)
    position_of[order] = np.arange(len(order))
    first, second = first[order], second[order]
    reverse = position_of[opposite[order]]

    xi = grid.positions[second] - grid.positions[first]
    length = np.hypot(xi[:, 0], xi[:, 1])
    if influence == "gaussian":
        weight = np.exp(-(length ** 2) / horizon ** 2)
    else:
        weight = np.ones_like(length)

    n_nodes = grid.n_nodes
    neighbour_volume = grid.volumes[second]
    weighted_volume = np.bincount(
        first, weights=weight * length ** 2 * neighbour_volume, minlength=n_nodes
    )
    unit_weighted_volume = np.bincount(
        first, weights=length ** 2 * neighbour_volume, minlength=n_nodes
    )
    if np.any(weighted_volume <= 0):
        raise ConfigurationError("Node without neighbours inside the horizon")

    bonds = BondTable(
        first=first,
        second=second,
        xi=xi,
        length=length,
        weight=weight,
        reverse=reverse,
        intact=np.ones(len(first), dtype=bool),
        offsets=np.searchsorted(first, np.arange(n_nodes + 1)),
        weighted_volume=weighted_volume,
        unit_weighted_volume=unit_weighted_volume,
        horizon=horizon,
    )
    logger.info(f"Built {n_pairs} bonds (delta={horizon}, {2 * n_pairs / n_nodes:.1f} per node)")
    return bonds


def build_fluid_mesh(grid: NodeGrid) -> FluidMesh:
    """One bilinear quad per cell, nodes ordered counter-clockwise from the lower-left corner."""
    ii, jj = np.meshgrid(np.arange(grid.nx), np.arange(grid.ny))
    lower_left = (jj * (grid.nx + 1) + ii).ravel()
    row = grid.nx + 1
    elements = np.column_stack(
        [lower_left, lower_left + 1, lower_left + 1 + row, lower_left + row]
    ).astype(np.int64)

    g = GAUSS_POINT
    gauss_points = np.array([[-g, -g], [g, -g], [g, g], [-g, g]])
    return FluidMesh(
        elements=elements,
        spacing=grid.spacing,
        thickness=grid.thickness,
        gauss_points=gauss_points,
        gauss_weights=np.ones(4),
    )


def crack_crossing_mask(bonds: BondTable, grid: NodeGrid, segment: CrackSegment) -> np.ndarray:
    """
    Select bonds whose chord crosses ``segment``.

    A chord crosses when its end nodes lie strictly on opposite sides of the
    crack line and the crack end points are not both on one side of the
    chord line. Nodes lying on the crack line never lose bonds.
    """
    a = np.asarray(segment.start, dtype=float)
    b = np.asarray(segment.end, dtype=float)
    if np.allclose(a, b):
        return np.zeros(bonds.n_bonds, dtype=bool)

    p = grid.positions[bonds.first]
    q = grid.positions[bonds.second]
    crack = b - a

    side_p = crack[0] * (p[:, 1] - a[1]) - crack[1] * (p[:, 0] - a[0])
    side_q = crack[0] * (q[:, 1] - a[1]) - crack[1] * (q[:, 0] - a[0])
    chord = q - p
    side_a = chord[:, 0] * (a[1] - p[:, 1]) - chord[:, 1] * (a[0] - p[:, 0])
    side_b = chord[:, 0] * (b[1] - p[:, 1]) - chord[:, 1] * (b[0] - p[:, 0])
    return (side_p * side_q < 0.0) & (side_a * side_b <= 0.0)


def apply_initial_crack(
    segments: Iterable[CrackSegment], grid: NodeGrid, bonds: BondTable
) -> int:
    """
    Break every bond crossing one of ``segments``.

    Returns:
        Number of unordered bonds broken
    """
    broken = 0
    for segment in segments:
        broken += bonds.break_bonds(crack_crossing_mask(bonds, grid, segment))
    logger.info(f"Initial cracks broke {broken} bonds")
    return broken
