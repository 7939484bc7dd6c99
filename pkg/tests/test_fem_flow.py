import numpy as np
import pytest

from hydrofrac.exceptions import ConfigurationError
from hydrofrac.services import fem_flow, solvers
from hydrofrac.services.fem_flow import FlowSystem


def test_shape_functions_at_centre():
    values, gradients = fem_flow.shape_functions(0.0, 0.0)
    np.testing.assert_allclose(values, 0.25)
    np.testing.assert_allclose(gradients.sum(axis=0), 0.0, atol=1e-15)


def test_shape_functions_at_corner():
    values, _ = fem_flow.shape_functions(-1.0, -1.0)
    np.testing.assert_allclose(values, [1.0, 0.0, 0.0, 0.0])


def test_shape_functions_partition_of_unity():
    values, gradients = fem_flow.shape_functions(0.3, -0.7)
    assert values.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(gradients.sum(axis=0), 0.0, atol=1e-15)


def test_shape_functions_reject_outside_points():
    with pytest.raises(ValueError):
        fem_flow.shape_functions(1.5, 0.0)


def test_map_to_element_centre(small):
    grid, _, mesh = small
    point = fem_flow.map_to_element(mesh, grid.positions, 7, 0.0, 0.0)
    np.testing.assert_allclose(point, grid.positions[mesh.elements[7]].mean(axis=0))


def test_templates(small):
    _, _, mesh = small
    templates = fem_flow.element_templates(mesh)
    assert templates.mass.sum() == pytest.approx(mesh.element_area)
    np.testing.assert_allclose(templates.laplacian, templates.laplacian.T)
    np.testing.assert_allclose(templates.laplacian.sum(axis=1), 0.0, atol=1e-14)
    np.testing.assert_allclose(templates.gradient.sum(axis=0), 0.0, atol=1e-14)


def test_unit_element_permeability_entries(make_lattice):
    grid, _, mesh = make_lattice(1.0, 1.0, spacing=1.0, m_ratio=2)
    H = fem_flow.assemble_H(mesh, 1.0).toarray()
    corner = grid.node_id(0, 0)
    assert H[corner, corner] == pytest.approx(2.0 / 3.0)
    assert H[corner, grid.node_id(1, 1)] == pytest.approx(-1.0 / 3.0)
    assert H[corner, grid.node_id(1, 0)] == pytest.approx(-1.0 / 6.0)
    assert H[corner, grid.node_id(0, 1)] == pytest.approx(-1.0 / 6.0)


def test_single_element_storage_row_sums(make_lattice):
    _, _, mesh = make_lattice(1.0, 1.0, spacing=1.0, m_ratio=2)
    S = fem_flow.assemble_S(mesh, 1.0)
    np.testing.assert_allclose(np.asarray(S.sum(axis=1)).ravel(), 0.25)


def test_zero_storage_gives_zero_matrix(small):
    _, _, mesh = small
    assert fem_flow.assemble_S(mesh, 0.0).count_nonzero() == 0
    assert fem_flow.assemble_Q(mesh, 0.0).count_nonzero() == 0


def test_shared_edge_entries_are_summed(make_lattice):
    grid, _, mesh = make_lattice(2.0, 1.0, spacing=1.0, m_ratio=2)
    S = fem_flow.assemble_S(mesh, 1.0).toarray()
    single = fem_flow.element_templates(mesh).mass
    shared = grid.node_id(1, 0)
    # lower-right corner of element 0, lower-left of element 1
    assert S[shared, shared] == pytest.approx(single[1, 1] + single[0, 0])
    assert S[grid.node_id(0, 0), grid.node_id(2, 0)] == 0.0


def test_storage_integrates_to_area(small):
    _, _, mesh = small
    S = fem_flow.assemble_S(mesh, 3.0)
    assert S.sum() == pytest.approx(3.0 * 36.0)


def test_permeability_matrix_symmetric_with_constant_null_space(small, rng):
    _, _, mesh = small
    mobility = rng.random(mesh.n_elements) * 1e-9
    H = fem_flow.assemble_H(mesh, mobility)
    np.testing.assert_allclose(H.toarray(), H.T.toarray(), rtol=0, atol=1e-8 * abs(H).max())
    np.testing.assert_allclose(H @ np.ones(H.shape[0]), 0.0, atol=1e-8 * abs(H).max())
    assert np.linalg.eigvalsh(H.toarray()).min() > -1e-8 * abs(H).max()


def test_negative_properties_rejected(small):
    _, _, mesh = small
    with pytest.raises(ConfigurationError):
        fem_flow.assemble_S(mesh, -1.0)
    with pytest.raises(ConfigurationError):
        fem_flow.assemble_H(mesh, -1.0)
    with pytest.raises(ConfigurationError):
        fem_flow.assemble_H(mesh, np.nan)


def test_coupling_matrix_volumetric_strain(small):
    grid, _, mesh = small
    alpha, eps = 0.6, 1e-3
    Q = fem_flow.assemble_Q(mesh, alpha)
    assert Q.shape == (2 * grid.n_nodes, grid.n_nodes)

    translation = np.tile([1.0, -2.0], grid.n_nodes)
    np.testing.assert_allclose(Q.T @ translation, 0.0, atol=1e-12)

    stretch = np.column_stack([eps * grid.positions[:, 0], np.zeros(grid.n_nodes)]).ravel()
    assert (Q.T @ stretch).sum() == pytest.approx(alpha * eps * 36.0)


def test_uniform_pressure_loads_only_the_boundary(small):
    grid, _, mesh = small
    forces = (fem_flow.assemble_Q(mesh, 1.0) @ np.ones(grid.n_nodes)).reshape(-1, 2)
    interior = grid.node_id(3, 3)
    np.testing.assert_allclose(forces[interior], 0.0, atol=1e-14)
    assert np.abs(forces[grid.node_id(0, 3)]).max() > 0


def test_gravity_vector(small):
    _, _, mesh = small
    assert not fem_flow.assemble_gravity(mesh, 1e-9, 1000.0, (0.0, 0.0)).any()
    flux = fem_flow.assemble_gravity(mesh, 1e-9, 1000.0, (0.0, -9.81))
    assert flux.sum() == pytest.approx(0.0, abs=1e-18)
    assert flux[0] > 0


def _system(mesh, n):
    return FlowSystem(
        S=fem_flow.assemble_S(mesh, 1e-9),
        H=fem_flow.assemble_H(mesh, 1e-9),
        Q=fem_flow.assemble_Q(mesh, 1.0),
        q=np.zeros(n),
    )


def test_apply_flow_bcs(small):
    grid, _, mesh = small
    system = _system(mesh, grid.n_nodes)
    constrained = fem_flow.apply_flow_bcs(system, [(0, 1.0), (1, 2.0)], [(5, 1e-3), (5, 1e-3)])
    assert constrained.dirichlet == {0: 1.0, 1: 2.0}
    assert constrained.q[5] == pytest.approx(2e-3)
    assert not system.q.any()
    assert system.dirichlet == {}


def test_apply_flow_bcs_rejects_conflicts(small):
    grid, _, mesh = small
    system = _system(mesh, grid.n_nodes)
    with pytest.raises(ConfigurationError, match="Conflicting"):
        fem_flow.apply_flow_bcs(system, [(0, 1.0), (0, 2.0)])
    with pytest.raises(ConfigurationError):
        fem_flow.apply_flow_bcs(system, [(grid.n_nodes, 1.0)])
    with pytest.raises(ConfigurationError):
        fem_flow.apply_flow_bcs(system, sources=[(-1, 1.0)])


def test_steady_darcy_profile_is_exact(make_lattice):
    grid, _, mesh = make_lattice(4.0, 1.0, spacing=0.5, m_ratio=2)
    mobility, p_in = 1e-9, 1e6
    H = fem_flow.assemble_H(mesh, mobility)
    left, right = grid.boundary_groups["left"], grid.boundary_groups["right"]
    fixed = np.concatenate([left, right])
    values = np.concatenate([np.full(len(left), p_in), np.zeros(len(right))])
    order = np.argsort(fixed)

    p = solvers.ConstrainedSolver(H, fixed[order]).solve(np.zeros(grid.n_nodes), values[order])
    np.testing.assert_allclose(p, p_in * (1.0 - grid.positions[:, 0] / 4.0), rtol=0, atol=1e-8 * p_in)
    # inflow through the 1 m high inlet
    assert (H @ p)[left].sum() == pytest.approx(mobility * p_in / 4.0, rel=1e-8)


def test_source_rate_is_not_divided_by_thickness(make_lattice):
    grid, _, mesh = make_lattice(4.0, 4.0, m_ratio=2, thickness=2.0)
    system = fem_flow.apply_flow_bcs(_system(mesh, grid.n_nodes), sources=[(grid.node_id(2, 2), 1e-3)])
    assert system.S.sum() == pytest.approx(1e-9 * 16.0 * 2.0)

    dt = 0.1
    p = solvers.FlowStepper(system, dt, 1.0).step(np.zeros(grid.n_nodes))
    assert (system.S @ p).sum() == pytest.approx(dt * 1e-3, rel=1e-8)
