"""
Benchmark runs against closed-form references and phenomenology checks.

Every benchmark loads its presets from the config directory, runs the
scenario, compares with ``oracles`` and returns a ``BenchmarkReport``
whose ``passed`` flag is the conjunction of its acceptance checks.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConfigurationError
from ..models import ScenarioConfig
from . import oracles, writers
from .config_loader import load_config

logger = logging.getLogger(__name__)

# Presets ship inside the package
DEFAULT_CONFIG_DIR = Path(__file__).resolve().parents[1] / "config"
TABLE_COLUMNS = ["series", "location", "numeric", "analytic", "error"]

CONSOLIDATION_TIMES = (20.0, 40.0, 60.0, 80.0, 100.0)
CONSOLIDATION_TOLERANCE = 0.05
CRACK_DIFFUSION_TIMES = (0.1, 0.2, 0.3, 0.5)
CRACK_DIFFUSION_TOLERANCE = 0.05
# P/P0 below this is compared against the floor instead (the front tends to zero)
CRACK_DIFFUSION_FLOOR = 0.2
SNEDDON_TOLERANCE = 0.10
INITIATION_PRESSURE = 59.235e6
INITIATION_TOLERANCE = 0.05
INJECTION_RATES = (1e-3, 2e-3, 4e-3, 6e-3)
SPIKE_DROP = 0.2
MIN_OSCILLATIONS = 3
MIN_PLATEAU = 5


@dataclass
class BenchmarkRow:
    series: str
    location: float
    numeric: float
    analytic: float
    error: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class BenchmarkReport:
    """Comparison table plus named pass/fail checks."""

    name: str
    rows: List[BenchmarkRow] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)
    table_path: Optional[Path] = None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def add_series(self, series: str, locations, numeric, analytic) -> float:
        """Append a compared series; returns its relative L2 error."""
        numeric = np.asarray(numeric, dtype=float)
        analytic = np.asarray(analytic, dtype=float)
        scale = float(np.max(np.abs(analytic))) or 1.0
        for x, num, ana in zip(locations, numeric, analytic):
            self.rows.append(BenchmarkRow(series, float(x), float(num), float(ana), abs(num - ana) / scale))
        return relative_l2(numeric, analytic)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        failed = [name for name, ok in self.checks.items() if not ok]
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{self.name}: {verdict}{detail}"


def relative_l2(numeric: np.ndarray, analytic: np.ndarray) -> float:
    norm = np.linalg.norm(analytic)
    if norm == 0.0:
        return float(np.linalg.norm(numeric))
    return float(np.linalg.norm(np.asarray(numeric) - np.asarray(analytic)) / norm)


def max_relative_difference(numeric, analytic, floor: float) -> float:
    """max |numeric - analytic| / max(|analytic|, floor) over the series."""
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    numeric = np.asarray(numeric, dtype=float)
    analytic = np.asarray(analytic, dtype=float)
    if numeric.size == 0:
        return 0.0
    return float(np.max(np.abs(numeric - analytic) / np.maximum(np.abs(analytic), floor)))


def _preset(config_dir: Path, filename: str) -> ScenarioConfig:
    path = Path(config_dir) / filename
    if not path.exists():
        raise ConfigurationError(f"Benchmark preset not found: {path}")
    return load_config(path)


def _boundary_value(config: ScenarioConfig, kind: str, group: str) -> float:
    for bc in config.boundary:
        if bc.kind == kind and bc.group == group:
            return bc.value
    raise ConfigurationError(f"{config.name}: no {kind} condition on group '{group}'")


def _scenario(config: ScenarioConfig, out_dir: Optional[Path]):
    from ..scenarios import create_scenario

    return create_scenario(config, out_dir)


# ---- Consolidation ----

def consolidation_benchmark(config_dir: Path, out_dir: Optional[Path] = None) -> BenchmarkReport:
    config = _preset(config_dir, "consolidation.yaml")
    report = BenchmarkReport("consolidation")
    dt = config.time.dt
    capture = {t: int(round(t / dt)) for t in CONSOLIDATION_TIMES}

    scenario = _scenario(config, out_dir)
    scenario.capture_steps = set(capture.values())
    record = scenario.run(max(capture.values()))
    history = record.extras["history"]

    grid = scenario.grid
    length = config.grid.extent_y
    load = abs(_boundary_value(config, "traction", "top"))
    params = oracles.ConsolidationParams.from_materials(config.solid, config.flow, length, load)
    column = grid.column(int(round(grid.nx / 2)))
    x = length - grid.positions[column, 1]
    order = np.argsort(x)
    column, x = column[order], x[order]
    p_scale = params.pressure_ratio * load
    u_scale = params.compliance * load * length

    for t, step in capture.items():
        u, p = history[step]
        p_error = report.add_series(
            f"p/(vP0)@{t:g}s", x / length, p[column] / p_scale, oracles.consolidation_pressure(x, t, params) / p_scale
        )
        u_error = report.add_series(
            f"u/(aP0L)@{t:g}s", x / length, -u[column, 1] / u_scale,
            oracles.consolidation_displacement(x, t, params) / u_scale,
        )
        report.metrics[f"pressure_error@{t:g}s"] = p_error
        report.metrics[f"displacement_error@{t:g}s"] = u_error
        report.checks[f"pressure@{t:g}s"] = p_error <= CONSOLIDATION_TOLERANCE
        report.checks[f"displacement@{t:g}s"] = u_error <= CONSOLIDATION_TOLERANCE
        logger.info(f"consolidation t={t:g}s: pressure error {p_error:.3%}, displacement error {u_error:.3%}")
    return report


# ---- Single-crack pressure diffusion ----

def _crack_diffusion_errors(
    config: ScenarioConfig, out_dir: Optional[Path], report: BenchmarkReport, label: str
) -> Dict[float, float]:
    flow, coupling = config.flow, config.coupling
    crack = config.cracks[0]
    length = crack.length
    aperture = coupling.prescribed_aperture
    if aperture is None:
        raise ConfigurationError("crack-diffusion presets need coupling.prescribed_aperture")
    capture = {
        T_d: int(round(oracles.time_for_dimensionless(T_d, aperture, flow.fluid_bulk_modulus, flow.viscosity, length) / config.time.dt))
        for T_d in CRACK_DIFFUSION_TIMES
    }

    scenario = _scenario(config, out_dir)
    scenario.capture_steps = set(capture.values())
    record = scenario.run(max(capture.values()))
    grid = scenario.grid

    P0 = _boundary_value(config, "pressure", "left")
    below = int(math.floor(crack.start[1] / grid.spacing + 1e-9))
    if below * grid.spacing == crack.start[1]:
        below -= 1
    row = grid.row(below)
    x = grid.positions[row, 0] - min(crack.start[0], crack.end[0])
    inside = (x >= -1e-12) & (x <= length * (1 + 1e-12))
    row, x = row[inside], np.clip(x[inside], 0.0, length)
    zeta = (length - x) / length

    errors = {}
    for T_d, step in capture.items():
        p = record.extras["history"][step]
        actual = oracles.dimensionless_time(
            step * config.time.dt, aperture, flow.fluid_bulk_modulus, flow.viscosity, length
        )
        analytic = oracles.crack_pressure_profile(zeta, actual)
        report.add_series(f"{label} P/P0@Td={T_d:g}", zeta, p[row] / P0, analytic)
        errors[T_d] = max_relative_difference(p[row] / P0, analytic, CRACK_DIFFUSION_FLOOR)
        logger.info(
            f"crack-diffusion {label} T_d={T_d:g}: max relative difference {errors[T_d]:.3%}"
            f" (floor {CRACK_DIFFUSION_FLOOR:g} P0)"
        )
    return errors


def crack_diffusion_benchmark(config_dir: Path, out_dir: Optional[Path] = None) -> BenchmarkReport:
    report = BenchmarkReport("crack-diffusion")
    fine = _crack_diffusion_errors(_preset(config_dir, "crack_diffusion.yaml"), out_dir, report, "fine")
    coarse = _crack_diffusion_errors(_preset(config_dir, "crack_diffusion_coarse.yaml"), out_dir, report, "coarse")
    for T_d in CRACK_DIFFUSION_TIMES:
        report.metrics[f"fine_max_relative@Td={T_d:g}"] = fine[T_d]
        report.metrics[f"coarse_max_relative@Td={T_d:g}"] = coarse[T_d]
        report.checks[f"fine@Td={T_d:g}"] = fine[T_d] <= CRACK_DIFFUSION_TOLERANCE
        report.checks[f"refinement@Td={T_d:g}"] = fine[T_d] < coarse[T_d]
    return report


# ---- Sneddon crack opening and initiation ----

def _face_profile(scenario, response: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Half-opening per Pascal along the crack and the crack half-length."""
    crack = scenario.config.cracks[0]
    grid = scenario.grid
    dx = grid.spacing
    below = int(math.floor(crack.start[1] / dx + 1e-9))
    lower, upper = grid.row(below), grid.row(below + 1)
    half_length = 0.5 * crack.length
    centre = crack.center[0]
    x = grid.positions[lower, 0] - centre
    inside = np.abs(x) < half_length - 1e-12
    opening = 0.5 * (response[upper[inside], 1] - response[lower[inside], 1])
    return x[inside], opening, half_length


def _sneddon_error(config: ScenarioConfig, out_dir: Optional[Path], report: BenchmarkReport, label: str):
    scenario = _scenario(config, out_dir)
    solver = scenario.build_solver()
    response = scenario.unit_response(solver)
    x, opening, half_length = _face_profile(scenario, response)
    solid = config.solid
    analytic = oracles.sneddon_opening(x, 1.0, half_length, solid.youngs_modulus, solid.poisson_ratio)
    error = report.add_series(f"{label} opening per Pa", x / half_length, opening, analytic)
    logger.info(f"sneddon {label}: relative L2 error {error:.3%}")
    return error


def sneddon_benchmark(config_dir: Path, out_dir: Optional[Path] = None, initiation: bool = True) -> BenchmarkReport:
    report = BenchmarkReport("sneddon")
    fine_config = _preset(config_dir, "sneddon.yaml")
    fine = _sneddon_error(fine_config, out_dir, report, "fine")
    coarse = _sneddon_error(_preset(config_dir, "sneddon_coarse.yaml"), out_dir, report, "coarse")
    report.metrics["fine_error"] = fine
    report.metrics["coarse_error"] = coarse
    report.checks["opening"] = fine <= SNEDDON_TOLERANCE
    report.checks["refinement"] = fine < coarse

    if initiation:
        scenario = _scenario(fine_config, out_dir)
        scenario.stop_after_initiation = True
        record = scenario.run(fine_config.loading.ramp_steps)
        pressure = record.extras.get("initiation_pressure", math.nan)
        report.metrics["initiation_pressure"] = pressure
        report.rows.append(
            BenchmarkRow("initiation pressure", 0.0, pressure, INITIATION_PRESSURE,
                         abs(pressure - INITIATION_PRESSURE) / INITIATION_PRESSURE)
        )
        report.checks["initiation"] = (
            math.isfinite(pressure) and abs(pressure - INITIATION_PRESSURE) <= INITIATION_TOLERANCE * INITIATION_PRESSURE
        )
        logger.info(f"sneddon: initiation pressure {pressure:.6e} Pa")
    return report


# ---- Fluid-driven phenomenology ----

def local_maxima(values: Sequence[float]) -> int:
    values = np.asarray(values, dtype=float)
    if len(values) < 3:
        return 0
    middle = values[1:-1]
    return int(np.count_nonzero((middle > values[:-2]) & (middle >= values[2:])))


def longest_plateau(values: Sequence[float]) -> int:
    """Longest run of consecutive equal values, in steps."""
    longest = run = 1 if len(values) else 0
    for previous, current in zip(values[:-1], values[1:]):
        run = run + 1 if current == previous else 1
        longest = max(longest, run)
    return longest


def fluid_driven_checks(pressures: Sequence[float], lengths: Sequence[float], onset: Optional[int]) -> Dict[str, bool]:
    """
    Phenomenology of a fluid-driven run.

    ``onset`` is the row index of the first bond failure (None: no failure).
    """
    pressures = np.asarray(pressures, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    checks = {"initiation": onset is not None}
    if len(pressures):
        peak = int(np.argmax(pressures))
        after = pressures[peak:]
        checks["spike_then_drop"] = peak < len(pressures) - 1 and after.min() <= (1.0 - SPIKE_DROP) * pressures[peak]
    else:
        checks["spike_then_drop"] = False
    tail = pressures[onset:] if onset is not None else pressures[:0]
    checks["oscillation"] = local_maxima(tail) >= MIN_OSCILLATIONS
    checks["non_decreasing_length"] = bool(np.all(np.diff(lengths) >= 0.0))
    tail_lengths = lengths[onset:] if onset is not None else lengths[:0]
    checks["stepwise_advance"] = longest_plateau(list(tail_lengths)) >= MIN_PLATEAU
    return checks


def fluid_driven_benchmark(config_dir: Path, out_dir: Optional[Path] = None) -> BenchmarkReport:
    config = _preset(config_dir, "fluid_driven.yaml")
    report = BenchmarkReport("fluid-driven")
    record = _scenario(config, out_dir).run()
    onset_step = record.extras.get("initiation_step")
    onset = None
    if onset_step is not None:
        onset = next(i for i, row in enumerate(record.rows) if row.step == onset_step)

    for row in record.rows:
        report.rows.append(BenchmarkRow("injection_pressure", row.time, row.injection_pressure, math.nan, math.nan))
        report.rows.append(BenchmarkRow("crack_length", row.time, row.crack_length, math.nan, math.nan))
    report.checks.update(fluid_driven_checks(record.injection_pressures, record.crack_lengths, onset))
    if onset_step is not None:
        report.metrics["initiation_pressure"] = record.extras["initiation_pressure"]
    return report


def injection_rate_benchmark(
    config_dir: Path, out_dir: Optional[Path] = None, rates: Sequence[float] = INJECTION_RATES
) -> BenchmarkReport:
    base = _preset(config_dir, "fluid_driven.yaml")
    report = BenchmarkReport("injection-rate")
    pressures = []
    for rate in rates:
        injection = [dataclasses.replace(inj, rate=rate) for inj in base.injection]
        config = dataclasses.replace(base, injection=injection)
        scenario = _scenario(config, out_dir)
        scenario.stop_after_initiation = True
        record = scenario.run()
        pressure = record.extras.get("initiation_pressure", math.nan)
        pressures.append(pressure)
        report.rows.append(BenchmarkRow("initiation pressure", rate, pressure, math.nan, math.nan))
        logger.info(f"injection-rate Q={rate:g}: initiation pressure {pressure:.6e} Pa")
    finite = all(math.isfinite(p) for p in pressures)
    report.checks["initiation"] = finite
    report.checks["increasing_with_rate"] = finite and all(b > a for a, b in zip(pressures[:-1], pressures[1:]))
    return report


BENCHMARKS: Dict[str, Callable[..., BenchmarkReport]] = {
    "consolidation": consolidation_benchmark,
    "crack-diffusion": crack_diffusion_benchmark,
    "sneddon": sneddon_benchmark,
    "fluid-driven": fluid_driven_benchmark,
    "injection-rate": injection_rate_benchmark,
}


def run_benchmark(
    name: str, config_dir: Optional[Path] = None, out_dir: Optional[Path] = None
) -> BenchmarkReport:
    """
    Run a named benchmark and write ``bench_<name>.csv`` to ``out_dir``.

    Raises:
        ConfigurationError: unknown benchmark or missing preset
        SolverError: propagated from the scenario run
    """
    if name not in BENCHMARKS:
        raise ConfigurationError(f"Unknown benchmark '{name}' (known: {', '.join(BENCHMARKS)})")
    config_dir = Path(config_dir) if config_dir is not None else DEFAULT_CONFIG_DIR
    logger.info(f"Running benchmark {name} with presets from {config_dir}")
    report = BENCHMARKS[name](config_dir, out_dir)
    if out_dir is not None:
        report.table_path = writers.write_table(
            (row.to_dict() for row in report.rows), TABLE_COLUMNS, Path(out_dir) / f"bench_{name}.csv"
        )
    logger.info(report.summary())
    return report
