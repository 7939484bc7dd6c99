import dataclasses

import numpy as np
import pytest

from hydrofrac.exceptions import ConfigurationError
from hydrofrac.models import SCENARIO_NAMES
from hydrofrac.scenarios import (
    SCENARIOS,
    ConsolidationScenario,
    CrackDiffusionScenario,
    FluidDrivenScenario,
    PressureDrivenScenario,
    create_scenario,
)
from hydrofrac.services.config_loader import load_config, parse_config

MATERIALS = """\
solid:
  youngs_modulus: 1.0e+9
  poisson_ratio: 0.25
  fracture_energy: 100.0
flow:
  biot: 1.0
  porosity: 0.2
  permeability: 1.0e-12
  viscosity: 1.0e-3
  fluid_bulk_modulus: 2.0e+9
"""

HELPERS = """\
scenario:
  name: fluid-driven
grid:
  extent_x: 1.0
  extent_y: 1.0
  spacing: 0.25
  m_ratio: 2
time:
  dt: 1.0e-3
boundary:
  - {group: left, kind: displacement, value: 0.0, component: x, layers: 2}
  - {group: bottom, kind: displacement, value: 0.0}
  - {group: top, kind: traction, value: -1.0e+4, component: y}
  - {group: top, kind: pressure, value: 0.0}
injection:
  - {location: [0.5, 0.5], rate: 1.0e-3}
""" + MATERIALS

CONSOLIDATION = """\
scenario:
  name: consolidation
grid:
  extent_x: 0.4
  extent_y: 2.0
  spacing: 0.1
  m_ratio: 3
solid:
  youngs_modulus: 1.0e+8
  poisson_ratio: 0.0
  fracture_energy: 100.0
flow:
  biot: 0.5
  porosity: 0.3
  permeability: 1.0e-12
  viscosity: 1.0e-3
  fluid_bulk_modulus: 2.2e+9
  storage: 1.65e-10
time:
  dt: 1.0
  steps: 20
boundary:
  - {group: top, kind: traction, value: -1.0e+4, component: y}
  - {group: top, kind: pressure, value: 0.0}
  - {group: bottom, kind: displacement, value: 0.0, component: y}
  - {group: all, kind: displacement, value: 0.0, component: x}
"""

CRACK_DIFFUSION = """\
scenario:
  name: crack-diffusion
grid:
  extent_x: 0.2
  extent_y: 0.05
  spacing: 0.01
  m_ratio: 3
solid:
  youngs_modulus: 1.0e+10
  poisson_ratio: 0.25
  fracture_energy: 100.0
flow:
  biot: 1.0
  porosity: 2.0e-5
  permeability: 1.0e-20
  viscosity: 1.0e-3
  fluid_bulk_modulus: 2.2e+9
time:
  dt: 2.0e-8
  theta: 0.5
  steps: 500
coupling:
  prescribed_aperture: 3.0e-5
cracks:
  - {start: [0.0, 0.0225], end: [0.2, 0.0225]}
boundary:
  - {group: left, kind: pressure, value: 9.5e+6}
"""

FLUID_DRIVEN = """\
scenario:
  name: fluid-driven
grid:
  extent_x: 0.2
  extent_y: 0.2
  spacing: 0.02
  m_ratio: 3
time:
  dt: 1.0e-3
  steps: 3
  adr_tolerance: 1.0e-5
  adr_max_iterations: 50000
cracks:
  - {start: [0.08, 0.11], end: [0.12, 0.11]}
boundary:
  - {group: left, kind: displacement, value: 0.0}
  - {group: right, kind: displacement, value: 0.0}
  - {group: bottom, kind: displacement, value: 0.0}
  - {group: top, kind: displacement, value: 0.0}
  - {group: left, kind: pressure, value: 0.0}
  - {group: right, kind: pressure, value: 0.0}
  - {group: bottom, kind: pressure, value: 0.0}
  - {group: top, kind: pressure, value: 0.0}
injection:
  - {location: [0.1, 0.1], rate: 1.0e-7}
""" + MATERIALS

PRESSURE_DRIVEN = """\
scenario:
  name: pressure-driven
grid:
  extent_x: 12.0
  extent_y: 12.0
  spacing: 1.0
  m_ratio: 3
time:
  dt: 1.0
  steps: 2
  adr_tolerance: 1.0e-5
  adr_max_iterations: 50000
loading:
  final_pressure: 1.0e+3
  ramp_steps: 4
  fast_forward: false
  flow_enabled: false
cracks:
  - {start: [2.0, 5.5], end: [10.0, 5.5]}
boundary:
  - {group: left, kind: displacement, value: 0.0}
  - {group: right, kind: displacement, value: 0.0}
  - {group: bottom, kind: displacement, value: 0.0}
  - {group: top, kind: displacement, value: 0.0}
""" + MATERIALS


def test_registry_covers_every_scenario_name():
    assert set(SCENARIOS) == set(SCENARIO_NAMES)
    config = parse_config(HELPERS)
    assert isinstance(create_scenario(config), FluidDrivenScenario)
    assert isinstance(create_scenario(dataclasses.replace(config, name="consolidation")), ConsolidationScenario)
    assert isinstance(create_scenario(dataclasses.replace(config, name="crack-diffusion")), CrackDiffusionScenario)
    assert isinstance(create_scenario(dataclasses.replace(config, name="pressure-driven")), PressureDrivenScenario)


def test_unknown_scenario_rejected():
    config = dataclasses.replace(parse_config(HELPERS), name="kgd")
    with pytest.raises(ConfigurationError, match="kgd"):
        create_scenario(config)


def test_boundary_helpers():
    scenario = create_scenario(parse_config(HELPERS))
    scenario.setup()
    grid = scenario.grid

    fixed = scenario.displacement_constraints()
    left = [grid.node_id(i, j) for j in range(5) for i in (0, 1)]
    bottom = [grid.node_id(i, 0) for i in range(5)]
    assert set(fixed) == {2 * n for n in left} | {2 * n + c for n in bottom for c in (0, 1)}
    assert set(fixed.values()) == {0.0}

    force = scenario.traction_forces().reshape(-1, 2)
    top = [grid.node_id(i, 4) for i in range(5)]
    np.testing.assert_allclose(force[top, 1], -2500.0)
    assert not force[:, 0].any()
    assert force[:, 1].sum() == pytest.approx(-12500.0)

    assert scenario.pressure_constraints() == {n: 0.0 for n in top}
    assert scenario.sources() == [(grid.node_id(2, 2), 1e-3)]
    assert scenario.probe_node() == grid.node_id(2, 2)


def test_probe_falls_back_to_domain_centre():
    scenario = create_scenario(parse_config(CONSOLIDATION))
    scenario.setup()
    assert scenario.probe_node() == scenario.grid.node_id(2, 10)


def test_consolidation_drains_through_the_top(write_config):
    scenario = create_scenario(load_config(write_config(CONSOLIDATION)))
    scenario.capture_steps = {0, 1}
    record = scenario.run()
    grid = scenario.grid
    watched = scenario.probe_node()
    top = [grid.node_id(i, 20) for i in range(5)]

    _, at_rest = record.extras["history"][0]
    np.testing.assert_array_equal(at_rest, 0.0)
    _, p0 = record.extras["history"][1]
    assert p0[watched] > 0
    np.testing.assert_array_equal(p0[top], 0.0)
    np.testing.assert_array_equal(record.final_state.p[top], 0.0)

    assert len(record.rows) == 20
    assert record.rows[-1].time == pytest.approx(20.0)
    assert record.final_state.p[watched] < 0.5 * p0[watched]
    # compressed under the top load
    assert record.final_state.u[top, 1].mean() < 0


def test_consolidation_rejects_initial_cracks():
    text = CONSOLIDATION + "cracks:\n  - {start: [0.0, 1.05], end: [0.4, 1.05]}\n"
    with pytest.raises(ConfigurationError, match="cracks"):
        create_scenario(parse_config(text)).run(1)


def test_crack_carries_the_pressure_front():
    cracked = create_scenario(parse_config(CRACK_DIFFUSION))
    record = cracked.run()
    grid = cracked.grid
    p = record.final_state.p
    p0 = 9.5e6

    np.testing.assert_array_equal(p[[grid.node_id(0, j) for j in range(6)]], p0)
    assert p[grid.node_id(5, 2)] > 0.05 * p0
    assert p[grid.node_id(3, 2)] > p[grid.node_id(15, 2)]
    assert record.rows[-1].cmod == pytest.approx(3e-5)

    crack = "cracks:\n  - {start: [0.0, 0.0225], end: [0.2, 0.0225]}\n"
    intact = create_scenario(parse_config(CRACK_DIFFUSION.replace(crack, "")))
    p_intact = intact.run().final_state.p
    assert abs(p_intact[grid.node_id(5, 2)]) < 1e-3 * p0


def test_fluid_driven_run_is_deterministic():
    first = create_scenario(parse_config(FLUID_DRIVEN)).run()
    second = create_scenario(parse_config(FLUID_DRIVEN)).run()
    assert len(first.rows) == 3
    assert [row.to_dict() for row in first.rows] == [row.to_dict() for row in second.rows]
    assert first.rows[0].injection_pressure > 0
    np.testing.assert_array_equal(first.final_state.u, second.final_state.u)


def test_pressure_driven_ramp_acts_on_crack_faces():
    scenario = create_scenario(parse_config(PRESSURE_DRIVEN))
    record = scenario.run()
    assert scenario.probe_node() == scenario.grid.node_id(6, 5)
    assert [row.injection_pressure for row in record.rows] == pytest.approx([250.0, 500.0])
    assert all(row.broken_bonds == 0 for row in record.rows)
    assert "initiation_step" not in record.extras

    # the pressurised notch opens at its centre
    response = record.extras["unit_response"]
    grid = scenario.grid
    assert response[grid.node_id(6, 6), 1] > 0
    assert response[grid.node_id(6, 5), 1] < 0


def test_narrow_column_loads_without_pressure_checkerboard(write_config):
    scenario = create_scenario(load_config(write_config(CONSOLIDATION)))
    scenario.capture_steps = {1}
    record = scenario.run(1)
    grid = scenario.grid
    _, p = record.extras["history"][1]

    centre_line = np.array([p[grid.node_id(2, j)] for j in range(2, 18)])
    assert np.all(centre_line > 0)
    # drained from the top
    assert centre_line[:8].mean() > centre_line[8:].mean()
