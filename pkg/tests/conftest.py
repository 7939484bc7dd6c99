"""Shared fixtures: small lattices and materials."""

import textwrap

import numpy as np
import pytest

from hydrofrac.models import FlowMaterial, GridConfig, SolidMaterial
from hydrofrac.services import discretization


@pytest.fixture
def solid():
    return SolidMaterial(youngs_modulus=1.0e9, poisson_ratio=0.25, fracture_energy=100.0)


@pytest.fixture
def flow():
    return FlowMaterial(
        biot=0.8,
        porosity=0.2,
        permeability=1.0e-12,
        viscosity=1.0e-3,
        fluid_bulk_modulus=2.0e9,
    )


def lattice(extent_x, extent_y, spacing=1.0, m_ratio=3, **kwargs):
    """Grid, bonds and mesh of a small lattice."""
    config = GridConfig(extent_x=extent_x, extent_y=extent_y, spacing=spacing, m_ratio=m_ratio, **kwargs)
    grid = discretization.build_grid(config)
    bonds = discretization.build_bonds(grid, config.horizon)
    mesh = discretization.build_fluid_mesh(grid)
    return grid, bonds, mesh


@pytest.fixture
def make_lattice():
    return lattice


@pytest.fixture
def small():
    """7 x 7 nodes, dx = 1, delta = 3."""
    return lattice(6.0, 6.0)


@pytest.fixture
def wide():
    """13 x 13 nodes; the centre node and its whole family have full families."""
    return lattice(12.0, 12.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def write_config(tmp_path):
    """Write a YAML scenario document to a temporary file and return its path."""

    def write(text, name="scenario.yaml"):
        path = tmp_path / name
        path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
        return path

    return write

