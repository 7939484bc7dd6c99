import numpy as np
import pytest

from hydrofrac.exceptions import ConfigurationError
from hydrofrac.models import CouplingSettings, CrackSegment, DomainIndicators
from hydrofrac.services import discretization, fem_flow, fracture_coupling, pd_solid


def test_classify_domains():
    indicators = fracture_coupling.classify_domains(np.array([0.0, 0.2, 0.275, 0.35, 0.9]))
    np.testing.assert_allclose(indicators.reservoir, [1.0, 1.0, 0.5, 0.0, 0.0])
    np.testing.assert_allclose(indicators.reservoir + indicators.fracture, 1.0)
    np.testing.assert_array_equal(indicators.fracture_nodes(), [3, 4])


def test_classify_domains_rejects_bad_thresholds():
    with pytest.raises(ConfigurationError):
        fracture_coupling.classify_domains(np.zeros(3), c1=0.4, c2=0.3)


def test_cubic_law():
    assert fracture_coupling.cubic_law(3e-5) == pytest.approx(7.5e-11)


def _indicators(chi_r):
    chi_r = np.asarray(chi_r, dtype=float)
    return DomainIndicators(c1=0.2, c2=0.35, reservoir=chi_r, fracture=1.0 - chi_r)


def test_reservoir_properties_unchanged(flow):
    props = fracture_coupling.interpolate_properties(_indicators([1.0]), flow, np.array([1e-3]))
    assert props.biot[0] == pytest.approx(flow.biot)
    assert props.porosity[0] == pytest.approx(flow.porosity)
    assert props.permeability[0] == pytest.approx(flow.permeability)
    assert props.storage[0] == pytest.approx(flow.storage_coefficient)
    assert props.coupling_biot[0] == pytest.approx(flow.biot)


def test_fracture_properties(flow):
    props = fracture_coupling.interpolate_properties(_indicators([0.0]), flow, np.array([3e-5]))
    assert props.biot[0] == 1.0
    assert props.porosity[0] == 1.0
    assert props.permeability[0] == pytest.approx(7.5e-11)
    assert props.storage[0] == pytest.approx(1.0 / flow.fluid_bulk_modulus)
    assert props.coupling_biot[0] == 0.0


def test_closed_fracture_keeps_reservoir_permeability(flow):
    props = fracture_coupling.interpolate_properties(_indicators([0.0]), flow, np.array([0.0]))
    assert props.permeability[0] == pytest.approx(flow.permeability)


def test_transition_blend(flow):
    props = fracture_coupling.interpolate_properties(_indicators([0.5]), flow, np.array([3e-5]))
    assert props.permeability[0] == pytest.approx(0.5 * (1e-12 + 7.5e-11))
    assert props.permeability[0] == pytest.approx(3.8e-11, rel=0.01)
    assert props.coupling_biot[0] == pytest.approx(props.biot[0])


def _pair(make_lattice):
    """Four nodes one cell apart with only the bond 0-1 broken."""
    grid, bonds, _ = make_lattice(0.05, 0.05, spacing=0.05, m_ratio=2)
    bonds.break_bonds((bonds.first == 0) & (bonds.second == 1))
    return grid, bonds


def test_aperture_of_opening_bond(make_lattice):
    grid, bonds = _pair(make_lattice)
    u = np.zeros((grid.n_nodes, 2))
    u[1] = [0.01, 0.0]
    aperture = fracture_coupling.compute_aperture(bonds, u, s_c=1e-3)
    assert aperture[0] == pytest.approx(0.01)
    assert aperture[1] == pytest.approx(0.01)
    assert aperture[2] == 0.0


def test_aperture_excludes_negative_projection(make_lattice):
    grid, bonds = _pair(make_lattice)
    u = np.zeros((grid.n_nodes, 2))
    # deformed length 0.06 at 60 degrees to the reference direction
    u[1] = [0.06 * 0.5 - 0.05, 0.06 * np.sqrt(3.0) / 2.0]
    aperture = fracture_coupling.compute_aperture(bonds, u, s_c=1e-3)
    np.testing.assert_array_equal(aperture, 0.0)


def test_aperture_zero_without_broken_bonds(small):
    grid, bonds, _ = small
    aperture = fracture_coupling.compute_aperture(bonds, 1e-2 * grid.positions, s_c=1e-3)
    np.testing.assert_array_equal(aperture, 0.0)


def test_closed_crack_sliding_gives_no_aperture(small):
    grid, bonds, _ = small
    discretization.apply_initial_crack([CrackSegment(start=(0.0, 2.5), end=(6.0, 2.5))], grid, bonds)
    u = np.zeros((grid.n_nodes, 2))
    u[grid.positions[:, 1] > 2.5, 0] = 0.5
    aperture = fracture_coupling.compute_aperture(bonds, u, s_c=1e-3, family_radius=1.0)
    np.testing.assert_allclose(aperture, 0.0, atol=1e-15)


def test_aperture_of_opened_crack(small):
    grid, bonds, _ = small
    discretization.apply_initial_crack([CrackSegment(start=(0.0, 2.5), end=(6.0, 2.5))], grid, bonds)
    opening = 1e-3
    u = np.zeros((grid.n_nodes, 2))
    u[grid.positions[:, 1] > 2.5, 1] = opening
    aperture = fracture_coupling.compute_aperture(bonds, u, s_c=1e-4, family_radius=1.0)
    np.testing.assert_allclose(aperture[grid.row(2)], opening)
    np.testing.assert_allclose(aperture[grid.row(3)], opening)
    np.testing.assert_array_equal(aperture[grid.row(1)], 0.0)

    full = fracture_coupling.compute_aperture(bonds, u, s_c=1e-4)
    assert np.all(full[grid.row(2)] > 0)
    assert np.all(full[grid.row(2)] <= opening * (1 + 1e-12))


def test_update_flow_properties_without_damage(small, flow):
    grid, bonds, mesh = small
    phi = pd_solid.damage(bonds, grid.volumes)
    _, _, operators = fracture_coupling.update_flow_properties(
        mesh, phi, np.zeros(grid.n_nodes), flow, CouplingSettings()
    )
    H = fem_flow.assemble_H(mesh, flow.mobility)
    S = fem_flow.assemble_S(mesh, flow.storage_coefficient)
    np.testing.assert_allclose(operators.H.toarray(), H.toarray())
    np.testing.assert_allclose(operators.S.toarray(), S.toarray())


def test_cracked_line_raises_permeability_only_there(wide, flow):
    grid, bonds, mesh = wide
    H0 = fem_flow.assemble_H(mesh, flow.mobility).toarray()
    discretization.apply_initial_crack([CrackSegment(start=(0.0, 5.5), end=(12.0, 5.5))], grid, bonds)
    phi = pd_solid.damage(bonds, grid.volumes)
    coupling = CouplingSettings(prescribed_aperture=1e-4)
    indicators, props, operators = fracture_coupling.update_flow_properties(
        mesh, phi, np.zeros(grid.n_nodes), flow, coupling
    )
    assert set(indicators.fracture_nodes()) >= set(grid.row(5)) | set(grid.row(6))
    np.testing.assert_allclose(props.permeability[grid.row(5)], fracture_coupling.cubic_law(1e-4))

    H = operators.H.toarray()
    along = grid.node_id(6, 5), grid.node_id(7, 5)
    far = grid.node_id(6, 11), grid.node_id(7, 11)
    assert abs(H[along]) > 100 * abs(H0[along])
    assert H[far] == pytest.approx(H0[far])
