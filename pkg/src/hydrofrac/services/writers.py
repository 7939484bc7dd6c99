"""
Output files: CSV time series and tables, legacy VTK snapshots.

All floats are written with 17 significant digits so files round-trip
exactly and are independent of locale.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from ..exceptions import HydrofracError
from ..models import FluidMesh, NodeGrid, SimState, TimeSeriesRow

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ["step", "time", "injection_pressure", "crack_length", "cmod", "broken_bonds"]
VTK_QUAD = 9
SNAPSHOT_SCALARS = ("pressure", "damage", "aperture")


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_table(rows: Iterable[Mapping], columns: Sequence[str], path: Union[str, Path]) -> Path:
    """Write dict rows as CSV with a header; an empty ``rows`` gives a header-only file."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(columns))
            writer.writeheader()
            for row in rows:
                writer.writerow({key: format_value(row[key]) for key in columns})
    except OSError as e:
        raise HydrofracError(f"Cannot write {path}: {e}") from e
    return path


def emit_timeseries(records: Sequence[TimeSeriesRow], path: Union[str, Path]) -> Path:
    """Time series CSV, one row per output step."""
    path = write_table((row.to_dict() for row in records), TIMESERIES_COLUMNS, path)
    logger.info(f"Wrote {len(records)} time-series rows to {path}")
    return path


def read_table(path: Union[str, Path]) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _lines_of(values: np.ndarray) -> List[str]:
    return [" ".join(format(float(v), ".17g") for v in np.atleast_1d(row)) for row in values]


def emit_snapshot(
    grid: NodeGrid,
    mesh: FluidMesh,
    state: SimState,
    fields: Mapping[str, np.ndarray],
    path: Union[str, Path],
    title: Optional[str] = None,
) -> Path:
    """
    Legacy VTK ASCII unstructured grid of the node lattice.

    Point data: every scalar in ``fields`` (e.g. damage, aperture) plus the
    pressure and the displacement of ``state``.
    """
    path = Path(path)
    n = grid.n_nodes
    points = np.column_stack([grid.positions, np.zeros(n)])
    displacement = np.column_stack([state.u, np.zeros(n)])
    scalars: Dict[str, np.ndarray] = {"pressure": np.asarray(state.p, dtype=float)}
    for name, values in fields.items():
        values = np.asarray(values, dtype=float)
        if values.shape != (n,):
            raise HydrofracError(f"Snapshot field '{name}' has shape {values.shape}, expected ({n},)")
        scalars[name] = values

    lines = [
        "# vtk DataFile Version 2.0",
        title or f"hydrofrac step {state.step} t={format(state.t, '.17g')}",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {n} double",
        *_lines_of(points),
        f"CELLS {mesh.n_elements} {5 * mesh.n_elements}",
        *(f"4 {a} {b} {c} {d}" for a, b, c, d in mesh.elements),
        f"CELL_TYPES {mesh.n_elements}",
        *([str(VTK_QUAD)] * mesh.n_elements),
        f"POINT_DATA {n}",
    ]
    for name, values in scalars.items():
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default", *_lines_of(values)]
    lines += ["VECTORS displacement double", *_lines_of(displacement)]

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise HydrofracError(f"Cannot write snapshot {path}: {e}") from e
    logger.debug(f"Wrote snapshot {path}")
    return path


def read_snapshot(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """
    Parse a snapshot written by ``emit_snapshot``.

    Returns:
        Dict with "points" (N, 3), "cells" (E, 4), "cell_types" (E,) and one
        entry per point-data array ((N,) scalars, (N, 3) vectors)
    """
    try:
        tokens = Path(path).read_text(encoding="utf-8").split("\n")
    except OSError as e:
        raise HydrofracError(f"Cannot read snapshot {path}: {e}") from e

    result: Dict[str, np.ndarray] = {}
    n_points = 0
    i = 4
    while i < len(tokens):
        line = tokens[i].split()
        i += 1
        if not line:
            continue
        keyword = line[0]
        if keyword == "POINTS":
            n_points = int(line[1])
            result["points"] = np.loadtxt(tokens[i:i + n_points], ndmin=2)
            i += n_points
        elif keyword == "CELLS":
            n_cells = int(line[1])
            cells = np.loadtxt(tokens[i:i + n_cells], dtype=np.int64, ndmin=2)
            result["cells"] = cells[:, 1:]
            i += n_cells
        elif keyword == "CELL_TYPES":
            n_cells = int(line[1])
            result["cell_types"] = np.loadtxt(tokens[i:i + n_cells], dtype=np.int64, ndmin=1)
            i += n_cells
        elif keyword == "SCALARS":
            # skip LOOKUP_TABLE
            result[line[1]] = np.loadtxt(tokens[i + 1:i + 1 + n_points], ndmin=1)
            i += 1 + n_points
        elif keyword == "VECTORS":
            result[line[1]] = np.loadtxt(tokens[i:i + n_points], ndmin=2)
            i += n_points
    return result
