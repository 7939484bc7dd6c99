import numpy as np
import pytest

from hydrofrac.exceptions import HydrofracError
from hydrofrac.models import SimState, TimeSeriesRow
from hydrofrac.services import writers


def test_empty_timeseries_has_header_only(tmp_path):
    path = writers.emit_timeseries([], tmp_path / "timeseries.csv")
    assert path.read_text(encoding="utf-8").strip() == ",".join(writers.TIMESERIES_COLUMNS)
    assert writers.read_table(path) == []


def test_timeseries_rows_keep_full_precision(tmp_path):
    rows = [
        TimeSeriesRow(step=0, time=0.0, injection_pressure=0.0, crack_length=0.0, cmod=0.0),
        TimeSeriesRow(step=1, time=0.1, injection_pressure=1.0 / 3.0, crack_length=0.25, cmod=2e-7, broken_bonds=4),
    ]
    path = writers.emit_timeseries(rows, tmp_path / "out" / "timeseries.csv")
    table = writers.read_table(path)
    assert len(table) == 2
    assert table[1]["step"] == "1"
    assert table[1]["broken_bonds"] == "4"
    assert float(table[1]["injection_pressure"]) == 1.0 / 3.0
    assert table[1]["time"] == "0.10000000000000001"


def test_format_value():
    assert writers.format_value(True) == "1"
    assert writers.format_value(np.int64(7)) == "7"
    assert writers.format_value(np.float64(0.5)) == "0.5"
    assert writers.format_value("label") == "label"


def test_snapshot_of_single_cell_grid(make_lattice, tmp_path):
    grid, _, mesh = make_lattice(2.0, 2.0, spacing=1.0, m_ratio=2)
    state = SimState.zeros(grid.n_nodes)
    state.p[:] = np.arange(grid.n_nodes, dtype=float)
    state.u[:, 1] = 1e-3
    damage = np.linspace(0.0, 0.5, grid.n_nodes)

    path = writers.emit_snapshot(
        grid, mesh, state, {"damage": damage, "aperture": np.zeros(grid.n_nodes)}, tmp_path / "s.vtk"
    )
    data = writers.read_snapshot(path)

    assert data["points"].shape == (9, 3)
    np.testing.assert_allclose(data["points"][:, :2], grid.positions)
    np.testing.assert_array_equal(data["cells"], mesh.elements)
    np.testing.assert_array_equal(data["cell_types"], [writers.VTK_QUAD] * 4)
    np.testing.assert_array_equal(data["pressure"], state.p)
    np.testing.assert_array_equal(data["damage"], damage)
    assert data["displacement"].shape == (9, 3)
    np.testing.assert_allclose(data["displacement"][:, 1], 1e-3)


def test_snapshot_rejects_mismatched_field(make_lattice, tmp_path):
    grid, _, mesh = make_lattice(1.0, 1.0, spacing=1.0, m_ratio=2)
    state = SimState.zeros(grid.n_nodes)
    with pytest.raises(HydrofracError, match="damage"):
        writers.emit_snapshot(grid, mesh, state, {"damage": np.zeros(3)}, tmp_path / "s.vtk")
