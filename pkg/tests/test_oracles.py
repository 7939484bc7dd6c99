import math

import numpy as np
import pytest

from hydrofrac.exceptions import ConfigurationError
from hydrofrac.models import FlowMaterial, SolidMaterial
from hydrofrac.services import oracles


@pytest.fixture
def column():
    return oracles.ConsolidationParams(
        biot=0.5,
        storage=1.0 / 6.06e9,
        permeability=1e-12,
        viscosity=1e-3,
        length=10.0,
        load=1e4,
        compliance=1e-8,
    )


def test_consolidation_constants(column):
    a, alpha, s = 1e-8, 0.5, 1.0 / 6.06e9
    assert column.undrained_compliance == pytest.approx(a / (1 + a * alpha ** 2 / s))
    assert column.pressure_ratio == pytest.approx(alpha * a / (s + a * alpha ** 2))
    assert column.consolidation_coefficient == pytest.approx(1e-12 / ((a * alpha ** 2 + s) * 1e-3))


def test_params_from_materials():
    solid = SolidMaterial(youngs_modulus=1e8, poisson_ratio=0.0, fracture_energy=100.0)
    flow = FlowMaterial(
        biot=0.5, porosity=0.3, permeability=1e-12, viscosity=1e-3,
        fluid_bulk_modulus=2.2e9, storage=1.0 / 6.06e9,
    )
    params = oracles.ConsolidationParams.from_materials(solid, flow, length=10.0, load=1e4)
    assert params.compliance == pytest.approx(1e-8)
    assert params.storage == pytest.approx(1.0 / 6.06e9)


def test_drained_end_has_zero_pressure(column):
    assert oracles.consolidation_pressure(0.0, 5.0, column) == pytest.approx(0.0, abs=1e-9)


def test_initial_pressure_is_undrained(column):
    p = oracles.consolidation_pressure(np.array([2.5, 5.0, 7.5]), 0.0, column)
    np.testing.assert_allclose(p, column.pressure_ratio * column.load, rtol=5e-3)


def test_pressure_drains_completely(column):
    p = oracles.consolidation_pressure(np.linspace(0.0, 10.0, 11), 1e6, column)
    np.testing.assert_allclose(p, 0.0, atol=1e-9)


def test_pressure_decays_in_time(column):
    times = [20.0, 50.0, 100.0, 200.0]
    values = [oracles.consolidation_pressure(10.0, t, column) for t in times]
    assert all(b < a for a, b in zip(values[:-1], values[1:]))


def test_displacement_limits(column):
    L, P0 = column.length, column.load
    assert oracles.consolidation_displacement(L, 20.0, column) == pytest.approx(0.0, abs=1e-15)
    drained = oracles.consolidation_displacement(0.0, 1e6, column)
    assert drained == pytest.approx(column.compliance * P0 * L, rel=1e-9)
    exact = oracles.ConsolidationParams(**{**column.__dict__, "n_terms": 20000})
    undrained = oracles.consolidation_displacement(0.0, 0.0, exact)
    assert undrained == pytest.approx(column.undrained_compliance * P0 * L, rel=1e-3)


def test_invalid_column_rejected(column):
    with pytest.raises(ConfigurationError):
        oracles.consolidation_pressure(11.0, 1.0, column)
    with pytest.raises(ConfigurationError):
        oracles.consolidation_pressure(1.0, -1.0, column)
    column.biot = 0.0
    with pytest.raises(ConfigurationError):
        oracles.consolidation_pressure(1.0, 1.0, column)


def test_crack_profile_driven_edge():
    for T_d in (0.01, 0.1, 0.5):
        assert oracles.crack_pressure_profile(1.0, T_d) == pytest.approx(1.0)


def test_crack_profile_far_end_early():
    assert oracles.crack_pressure_profile(0.0, 0.01) < 1e-6


def test_crack_profile_steady_state():
    np.testing.assert_allclose(oracles.crack_pressure_profile(np.linspace(0, 1, 6), 50.0), 1.0, atol=1e-12)


def test_crack_profile_monotone_along_crack():
    ratio = oracles.crack_pressure_profile(np.linspace(0, 1, 21), 0.2)
    assert np.all(np.diff(ratio) > 0)
    assert np.all((ratio > 0) & (ratio <= 1.0 + 1e-12))


def test_crack_profile_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        oracles.crack_pressure_profile(0.5, 0.0)
    with pytest.raises(ConfigurationError):
        oracles.crack_pressure_profile(1.5, 0.1)


def test_dimensionless_time_round_trip():
    args = (3e-5, 2.2e9, 1e-3, 0.2)
    assert oracles.dimensionless_time(1.0, *args) == pytest.approx(4125.0)
    t = oracles.time_for_dimensionless(0.1, *args)
    assert oracles.dimensionless_time(t, *args) == pytest.approx(0.1)


def test_sneddon_opening():
    E, nu, l_c, p = 2.1e11, 0.3, 0.05, 1e6
    mouth = 2 * p * l_c * (1 - nu ** 2) / E
    assert oracles.sneddon_opening(0.0, p, l_c, E, nu) == pytest.approx(mouth)
    assert oracles.sneddon_opening(l_c, p, l_c, E, nu) == 0.0
    assert oracles.sneddon_opening(-l_c, p, l_c, E, nu) == 0.0
    assert oracles.sneddon_opening(l_c * math.sqrt(3) / 2, p, l_c, E, nu) == pytest.approx(mouth / 2)
    profile = oracles.sneddon_opening(np.linspace(-l_c, l_c, 5), p, l_c, E, nu)
    assert profile.shape == (5,)


def test_sneddon_outside_crack_rejected():
    with pytest.raises(ConfigurationError):
        oracles.sneddon_opening(0.06, 1e6, 0.05, 2.1e11, 0.3)


def test_continuum_damage():
    assert oracles.continuum_damage(0.0, 0.03) == pytest.approx(0.5)
    assert oracles.continuum_damage(0.03, 0.03) == pytest.approx(0.0, abs=1e-12)
    assert oracles.continuum_damage(0.015, 0.03) == pytest.approx(0.1955, abs=1e-4)
    with pytest.raises(ConfigurationError):
        oracles.continuum_damage(0.04, 0.03)


def test_truncated_sum_stops_on_negligible_tail():
    terms = np.array([1.0, 0.5, 1e-20, 7.0])
    assert oracles.truncated_sum(terms) == pytest.approx(1.5)
    assert oracles.truncated_sum(np.array([1.0, 2.0])) == pytest.approx(3.0)
