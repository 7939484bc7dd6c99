"""Scenario implementations."""

from pathlib import Path
from typing import Dict, Optional, Type

from ..exceptions import ConfigurationError
from ..models import ScenarioConfig
from .base import BaseScenario
from .consolidation import ConsolidationScenario
from .crack_diffusion import CrackDiffusionScenario
from .fluid_driven import FluidDrivenScenario
from .fracture import FractureScenario
from .pressure_driven import PressureDrivenScenario

SCENARIOS: Dict[str, Type[BaseScenario]] = {
    "consolidation": ConsolidationScenario,
    "crack-diffusion": CrackDiffusionScenario,
    "pressure-driven": PressureDrivenScenario,
    "fluid-driven": FluidDrivenScenario,
}


def create_scenario(config: ScenarioConfig, out_dir: Optional[Path] = None) -> BaseScenario:
    try:
        cls = SCENARIOS[config.name]
    except KeyError:
        raise ConfigurationError(f"Unknown scenario '{config.name}'") from None
    return cls(config, out_dir)


__all__ = [
    "BaseScenario",
    "ConsolidationScenario",
    "CrackDiffusionScenario",
    "FractureScenario",
    "PressureDrivenScenario",
    "FluidDrivenScenario",
    "SCENARIOS",
    "create_scenario",
]
