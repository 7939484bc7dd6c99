"""
Scenario configuration loading and dumping.

Scenario files are YAML with one level of sections. Values are read with
``yaml.safe_load``; key positions come from ``yaml.compose`` so that every
error names the offending key and its line.
"""

import dataclasses
import logging
import typing
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from ..exceptions import ConfigurationError, HydrofracError
from ..models import (
    BOUNDARY_GROUPS,
    BOUNDARY_KINDS,
    COMPONENTS,
    SCENARIO_NAMES,
    BoundaryCondition,
    CouplingSettings,
    CrackSegment,
    FlowMaterial,
    GridConfig,
    Injection,
    LoadingSettings,
    OutputSettings,
    ScenarioConfig,
    SolidMaterial,
    TimeScheme,
)
from .pd_solid import KINEMATICS

logger = logging.getLogger(__name__)

# Sections holding a single mapping, by model class
MAPPING_SECTIONS = {
    "grid": GridConfig,
    "solid": SolidMaterial,
    "flow": FlowMaterial,
    "time": TimeScheme,
    "coupling": CouplingSettings,
    "loading": LoadingSettings,
    "output": OutputSettings,
}
# Sections holding a list of mappings
LIST_SECTIONS = {
    "cracks": CrackSegment,
    "boundary": BoundaryCondition,
    "injection": Injection,
}
SCENARIO_KEYS = ("name", "description")
REQUIRED_SECTIONS = ("scenario", "grid", "solid", "flow", "time")


class _KeyLines:
    """Line numbers (1-based) of every key path in a YAML document."""

    def __init__(self, text: str):
        self.lines: Dict[str, int] = {}
        try:
            root = yaml.compose(text)
        except yaml.YAMLError:
            root = None
        if root is not None:
            self._walk(root, "")

    def _walk(self, node: yaml.Node, prefix: str) -> None:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
                self.lines[path] = key_node.start_mark.line + 1
                self._walk(value_node, path)
        elif isinstance(node, yaml.SequenceNode):
            for index, item in enumerate(node.value):
                path = f"{prefix}[{index}]"
                self.lines[path] = item.start_mark.line + 1
                self._walk(item, path)

    def where(self, path: str) -> str:
        probe = path
        while probe:
            if probe in self.lines:
                return f"{path} (line {self.lines[probe]})"
            probe = probe.rpartition(".")[0] if "." in probe else probe.rpartition("[")[0]
        return path


def _coerce(value: Any, annotation: Any, where: str) -> Any:
    """Convert a YAML value to the annotated field type."""
    origin = typing.get_origin(annotation)
    args = typing.get_args(annotation)

    if origin is Union:
        if value is None and type(None) in args:
            return None
        inner = [arg for arg in args if arg is not type(None)]
        return _coerce(value, inner[0], where)
    if origin in (tuple, list):
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(f"{where}: expected a list, got {value!r}")
        if origin is tuple and args and args[-1] is not Ellipsis and len(value) != len(args):
            raise ConfigurationError(f"{where}: expected {len(args)} values, got {len(value)}")
        item_type = args[0] if args else float
        return tuple(_coerce(item, item_type, where) for item in value)

    if annotation is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"{where}: expected true/false, got {value!r}")
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigurationError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if annotation is float:
        if isinstance(value, bool):
            raise ConfigurationError(f"{where}: expected a number, got {value!r}")
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a sign (1.0e8) as strings
            try:
                return float(value)
            except ValueError:
                pass
        raise ConfigurationError(f"{where}: expected a number, got {value!r}")
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{where}: expected a string, got {value!r}")
        return value
    return value


def _build(cls, data: Any, path: str, lines: _KeyLines):
    """Instantiate dataclass ``cls`` from a mapping, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigurationError(f"{lines.where(path)}: expected a mapping")
    hints = typing.get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}

    unknown = sorted(set(data) - set(fields))
    if unknown:
        key = f"{path}.{unknown[0]}"
        raise ConfigurationError(f"{lines.where(key)}: unknown key (known: {', '.join(fields)})")

    kwargs = {}
    for name, f in fields.items():
        key = f"{path}.{name}"
        if name not in data:
            if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                raise ConfigurationError(f"{lines.where(path)}: missing required key '{name}'")
            continue
        kwargs[name] = _coerce(data[name], hints[name], lines.where(key))
    return cls(**kwargs)


def _validated(obj, path: str, lines: _KeyLines):
    try:
        obj.validate()
    except ConfigurationError as e:
        raise ConfigurationError(f"{lines.where(path)}: {e}") from e
    return obj


def _inside(point, grid: GridConfig) -> bool:
    tolerance = 1e-9 * max(grid.extent_x, grid.extent_y)
    return -tolerance <= point[0] <= grid.extent_x + tolerance and -tolerance <= point[1] <= grid.extent_y + tolerance


def _check_scenario(config: ScenarioConfig, lines: _KeyLines) -> None:
    """Cross-section checks once every section has been built."""
    grid = config.grid
    coupling = config.coupling
    if not 0.0 <= coupling.c1 < coupling.c2 <= 1.0:
        raise ConfigurationError(
            f"{lines.where('coupling.c1')}: thresholds must satisfy 0 <= c1 < c2 <= 1, "
            f"got c1={coupling.c1}, c2={coupling.c2}"
        )
    if coupling.kinematics not in KINEMATICS:
        raise ConfigurationError(
            f"{lines.where('coupling.kinematics')}: expected one of {KINEMATICS}, got '{coupling.kinematics}'"
        )
    if coupling.prescribed_aperture is not None and not coupling.prescribed_aperture > 0:
        raise ConfigurationError(f"{lines.where('coupling.prescribed_aperture')}: must be positive")

    for index, crack in enumerate(config.cracks):
        if not (_inside(crack.start, grid) and _inside(crack.end, grid)):
            raise ConfigurationError(
                f"{lines.where(f'cracks[{index}]')}: segment {crack.start} -> {crack.end} "
                f"leaves the domain [0, {grid.extent_x}] x [0, {grid.extent_y}]"
            )

    for index, bc in enumerate(config.boundary):
        where = lines.where(f"boundary[{index}]")
        if bc.group not in BOUNDARY_GROUPS:
            raise ConfigurationError(f"{where}: unknown group '{bc.group}' (known: {', '.join(BOUNDARY_GROUPS)})")
        if bc.kind not in BOUNDARY_KINDS:
            raise ConfigurationError(f"{where}: unknown kind '{bc.kind}' (known: {', '.join(BOUNDARY_KINDS)})")
        if bc.component not in COMPONENTS:
            raise ConfigurationError(f"{where}: unknown component '{bc.component}'")
        if bc.layers < 1:
            raise ConfigurationError(f"{where}: layers must be >= 1")

    dx = grid.spacing
    for index, injection in enumerate(config.injection):
        where = lines.where(f"injection[{index}]")
        x, y = injection.location
        snapped = (round(x / dx) * dx, round(y / dx) * dx)
        distance = ((x - snapped[0]) ** 2 + (y - snapped[1]) ** 2) ** 0.5
        if not _inside(injection.location, grid) or distance > 0.5 * dx * (1 + 1e-9):
            raise ConfigurationError(
                f"{where}: location {injection.location} is not within dx/2 of a grid node"
            )

    loading = config.loading
    if loading.ramp_steps < 1:
        raise ConfigurationError(f"{lines.where('loading.ramp_steps')}: must be >= 1")
    if config.output.snapshot_every < 0:
        raise ConfigurationError(f"{lines.where('output.snapshot_every')}: must be >= 0")


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """
    Parse and validate a scenario document.

    Raises:
        ConfigurationError: syntax errors, unknown or missing keys, invariant violations
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"{source}: invalid YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: expected a mapping of sections")
    lines = _KeyLines(text)

    known = set(MAPPING_SECTIONS) | set(LIST_SECTIONS) | {"scenario"}
    for section in data:
        if section not in known:
            raise ConfigurationError(f"{lines.where(str(section))}: unknown section (known: {', '.join(sorted(known))})")
    for section in REQUIRED_SECTIONS:
        if section not in data:
            raise ConfigurationError(f"{source}: missing required section '{section}'")

    header = data["scenario"]
    if not isinstance(header, dict):
        raise ConfigurationError(f"{lines.where('scenario')}: expected a mapping")
    for key in header:
        if key not in SCENARIO_KEYS:
            raise ConfigurationError(f"{lines.where(f'scenario.{key}')}: unknown key")
    name = header.get("name")
    if name not in SCENARIO_NAMES:
        raise ConfigurationError(
            f"{lines.where('scenario.name')}: expected one of {', '.join(SCENARIO_NAMES)}, got {name!r}"
        )

    sections = {}
    for section, cls in MAPPING_SECTIONS.items():
        if section in data:
            sections[section] = _build(cls, data[section] or {}, section, lines)
    for section in ("grid", "solid", "flow", "time"):
        _validated(sections[section], section, lines)

    lists: Dict[str, List] = {}
    for section, cls in LIST_SECTIONS.items():
        items = data.get(section) or []
        if not isinstance(items, list):
            raise ConfigurationError(f"{lines.where(section)}: expected a list")
        lists[section] = [_build(cls, item, f"{section}[{i}]", lines) for i, item in enumerate(items)]

    config = ScenarioConfig(
        name=name,
        description=str(header.get("description") or ""),
        cracks=lists["cracks"],
        boundary=lists["boundary"],
        injection=lists["injection"],
        **sections,
    )
    _check_scenario(config, lines)
    return config


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {path}: {e}") from e
    config = parse_config(text, str(path))
    logger.info(f"Loaded {config.name} scenario from {path}")
    return config


def _plain(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def dump_config(config: ScenarioConfig, path: Union[str, Path], header: Optional[str] = None) -> Path:
    """Write ``config`` in the scenario file layout; ``load_config`` reads it back."""
    path = Path(path)
    comment = header or f"{config.name} scenario"
    body = yaml.safe_dump(_plain(config.to_dict()), sort_keys=False, default_flow_style=None)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f"# {comment}\n{body}", encoding="utf-8")
    except OSError as e:
        raise HydrofracError(f"Cannot write config {path}: {e}") from e
    return path
