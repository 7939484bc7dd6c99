"""Fracture driven by fluid injected at a point."""

import logging

from ..models import ScenarioConfig
from .fracture import FractureScenario

logger = logging.getLogger(__name__)


class FluidDrivenScenario(FractureScenario):
    """
    Constant-rate injection into a notched, saturated sample.

    Pressure builds up at the injection node until bonds at the notch
    tips break; the crack then advances in steps while the injection
    pressure oscillates. Natural cracks are extra ``cracks`` entries.
    """

    def __init__(self, config: ScenarioConfig, out_dir=None):
        super().__init__(config, out_dir)
        if not config.injection:
            logger.warning(f"[{self.name}] No injection points configured; the run stays at rest")
