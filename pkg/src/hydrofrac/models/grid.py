"""Discretisation data models: grid configuration, PD nodes, bonds and the FE mesh."""

from dataclasses import dataclass, field
from typing import ClassVar, Dict, Set, Tuple

import numpy as np

from ..exceptions import ConfigurationError


@dataclass
class GridConfig:
    """
    Uniform structured grid shared by the PD solid and the FE flow mesh.

    The horizon is always ``m_ratio * spacing``.
    """

    extent_x: float
    extent_y: float
    spacing: float
    m_ratio: int = 3
    thickness: float = 1.0
    partial_boundary_volumes: bool = False

    CELL_TOLERANCE: ClassVar[float] = 1e-9

    @property
    def horizon(self) -> float:
        return self.m_ratio * self.spacing

    @property
    def nx(self) -> int:
        return self._cell_count(self.extent_x, "extent_x")

    @property
    def ny(self) -> int:
        return self._cell_count(self.extent_y, "extent_y")

    def _cell_count(self, extent: float, name: str) -> int:
        ratio = extent / self.spacing
        count = int(round(ratio))
        if count < 1 or abs(ratio - count) > self.CELL_TOLERANCE * max(1.0, ratio):
            raise ConfigurationError(
                f"{name}={extent} is not an integer multiple of spacing={self.spacing}"
            )
        return count

    def validate(self) -> None:
        """Check the grid invariants, raising ConfigurationError on violation."""
        if not self.spacing > 0:
            raise ConfigurationError(f"spacing must be positive, got {self.spacing}")
        if int(self.m_ratio) != self.m_ratio or self.m_ratio < 2:
            raise ConfigurationError(f"m_ratio must be an integer >= 2, got {self.m_ratio}")
        if not self.thickness > 0:
            raise ConfigurationError(f"thickness must be positive, got {self.thickness}")
        self.nx
        self.ny

    def to_dict(self) -> dict:
        return {
            "extent_x": self.extent_x,
            "extent_y": self.extent_y,
            "spacing": self.spacing,
            "m_ratio": self.m_ratio,
            "thickness": self.thickness,
            "partial_boundary_volumes": self.partial_boundary_volumes,
        }


@dataclass
class NodeGrid:
    """
    Node coordinates and volumes, the single geometric source of truth.

    Node ``(i, j)`` (column i, row j) has id ``j * (nx + 1) + i``.
    """

    positions: np.ndarray  # (N, 2) [m]
    volumes: np.ndarray  # (N,) [m^3]
    nx: int
    ny: int
    spacing: float
    thickness: float = 1.0
    boundary_groups: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    def node_id(self, i: int, j: int) -> int:
        return j * (self.nx + 1) + i

    def indices(self, node: int) -> Tuple[int, int]:
        """Return the (column, row) index pair of a node."""
        return node % (self.nx + 1), node // (self.nx + 1)

    def row(self, j: int) -> np.ndarray:
        start = j * (self.nx + 1)
        return np.arange(start, start + self.nx + 1)

    def column(self, i: int) -> np.ndarray:
        return i + (self.nx + 1) * np.arange(self.ny + 1)

    def tags_of(self, node: int) -> Set[str]:
        return {name for name, ids in self.boundary_groups.items() if node in ids}

    def nearest_node(self, point) -> Tuple[int, float]:
        """Return the id of the node closest to ``point`` and its distance."""
        distances = np.hypot(*(self.positions - np.asarray(point, dtype=float)).T)
        node = int(np.argmin(distances))
        return node, float(distances[node])


@dataclass
class BondTable:
    """
    Directed PD bonds.

    Every unordered pair {i, j} is stored twice, as (i, j) and (j, i);
    ``reverse[b]`` is the index of the opposite direction. Bonds are sorted
    by first node so ``offsets[i]:offsets[i + 1]`` is the family of node i.
    """

    first: np.ndarray  # (B,) int
    second: np.ndarray  # (B,) int
    xi: np.ndarray  # (B, 2) reference bond vectors [m]
    length: np.ndarray  # (B,) [m]
    weight: np.ndarray  # (B,) Gaussian influence
    reverse: np.ndarray  # (B,) int
    intact: np.ndarray  # (B,) bool
    offsets: np.ndarray  # (N + 1,) int
    weighted_volume: np.ndarray  # (N,) sum w |xi|^2 V
    unit_weighted_volume: np.ndarray  # (N,) sum |xi|^2 V, coupling normalisation
    horizon: float

    @property
    def n_bonds(self) -> int:
        return len(self.first)

    @property
    def n_nodes(self) -> int:
        return len(self.weighted_volume)

    def family(self, node: int) -> np.ndarray:
        """Neighbour ids of ``node`` (broken bonds included)."""
        return self.second[self.offsets[node]:self.offsets[node + 1]]

    def break_bonds(self, mask: np.ndarray) -> int:
        """
        Break the bonds selected by ``mask`` in both directions.

        Returns:
            Number of unordered bonds newly broken
        """
        newly = mask & self.intact
        if not newly.any():
            return 0
        before = int(np.count_nonzero(self.intact))
        selected = np.flatnonzero(newly)
        self.intact[selected] = False
        self.intact[self.reverse[selected]] = False
        return (before - int(np.count_nonzero(self.intact))) // 2

    def copy(self) -> "BondTable":
        return BondTable(
            first=self.first,
            second=self.second,
            xi=self.xi,
            length=self.length,
            weight=self.weight,
            reverse=self.reverse,
            intact=self.intact.copy(),
            offsets=self.offsets,
            weighted_volume=self.weighted_volume,
            unit_weighted_volume=self.unit_weighted_volume,
            horizon=self.horizon,
        )


@dataclass
class FluidMesh:
    """Bilinear quad mesh coincident with the node grid, one element per cell."""

    elements: np.ndarray  # (E, 4) counter-clockwise node ids
    spacing: float
    thickness: float = 1.0
    gauss_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    gauss_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def element_area(self) -> float:
        return self.spacing ** 2
