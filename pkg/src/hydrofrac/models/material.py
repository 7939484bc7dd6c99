"""Material parameter models for the PD solid and the pore fluid."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class SolidMaterial:
    """Linear isotropic solid skeleton with a Griffith fracture energy."""

    youngs_modulus: float  # E [Pa]
    poisson_ratio: float  # nu
    fracture_energy: float  # G_c [J/m^2]
    density: float = 2000.0  # rho_s [kg/m^3]

    @property
    def bulk_modulus(self) -> float:
        """kappa = E / (3 (1 - 2 nu))"""
        return self.youngs_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))

    @property
    def shear_modulus(self) -> float:
        """mu = E / (2 (1 + nu))"""
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    @property
    def plane_strain_modulus(self) -> float:
        return self.youngs_modulus / (1.0 - self.poisson_ratio ** 2)

    @property
    def constrained_modulus(self) -> float:
        """Oedometric modulus lambda + 2 mu."""
        nu = self.poisson_ratio
        return self.youngs_modulus * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu))

    def validate(self) -> None:
        if not self.youngs_modulus > 0:
            raise ConfigurationError(f"youngs_modulus must be positive, got {self.youngs_modulus}")
        if not -1.0 < self.poisson_ratio < 0.5:
            raise ConfigurationError(f"poisson_ratio must lie in (-1, 0.5), got {self.poisson_ratio}")
        if not self.fracture_energy > 0:
            raise ConfigurationError(f"fracture_energy must be positive, got {self.fracture_energy}")
        if not self.density > 0:
            raise ConfigurationError(f"density must be positive, got {self.density}")

    def to_dict(self) -> dict:
        return {
            "youngs_modulus": self.youngs_modulus,
            "poisson_ratio": self.poisson_ratio,
            "fracture_energy": self.fracture_energy,
            "density": self.density,
        }


@dataclass
class FlowMaterial:
    """
    Reservoir fluid and pore-space properties for the Biot flow equation.

    When ``storage`` is not given it is derived as
    ``(alpha - n)(1 - alpha) / K_s + n / K_w``; an unset ``grain_bulk_modulus``
    means incompressible grains.
    """

    biot: float  # alpha
    porosity: float  # n
    permeability: float  # k [m^2]
    viscosity: float  # mu_w [Pa s]
    fluid_bulk_modulus: float  # K_w [Pa]
    grain_bulk_modulus: Optional[float] = None  # K_s [Pa]
    fluid_density: float = 1000.0  # rho_f [kg/m^3]
    storage: Optional[float] = None  # s [1/Pa]
    gravity: Tuple[float, float] = field(default=(0.0, 0.0))

    @property
    def storage_coefficient(self) -> float:
        if self.storage is not None:
            return self.storage
        grain_term = 0.0
        if self.grain_bulk_modulus is not None:
            grain_term = (self.biot - self.porosity) * (1.0 - self.biot) / self.grain_bulk_modulus
        return grain_term + self.porosity / self.fluid_bulk_modulus

    @property
    def fracture_storage(self) -> float:
        """Storage with alpha = 1 and n = 1, i.e. 1 / K_w."""
        return 1.0 / self.fluid_bulk_modulus

    @property
    def mobility(self) -> float:
        return self.permeability / self.viscosity

    def validate(self) -> None:
        if not 0.0 <= self.porosity <= 1.0:
            raise ConfigurationError(f"porosity must lie in [0, 1], got {self.porosity}")
        if not self.permeability >= 0:
            raise ConfigurationError(f"permeability must be non-negative, got {self.permeability}")
        if not self.viscosity > 0:
            raise ConfigurationError(f"viscosity must be positive, got {self.viscosity}")
        if not self.fluid_bulk_modulus > 0:
            raise ConfigurationError(f"fluid_bulk_modulus must be positive, got {self.fluid_bulk_modulus}")
        if self.grain_bulk_modulus is not None and not self.grain_bulk_modulus > 0:
            raise ConfigurationError(f"grain_bulk_modulus must be positive, got {self.grain_bulk_modulus}")
        if not (self.storage_coefficient > 0 and math.isfinite(self.storage_coefficient)):
            raise ConfigurationError(f"storage coefficient must be positive, got {self.storage_coefficient}")
        if not 0.0 <= self.biot <= 1.0:
            logger.warning(f"Biot coefficient {self.biot} outside the expected range [0, 1]")

    def to_dict(self) -> dict:
        return {
            "biot": self.biot,
            "porosity": self.porosity,
            "permeability": self.permeability,
            "viscosity": self.viscosity,
            "fluid_bulk_modulus": self.fluid_bulk_modulus,
            "grain_bulk_modulus": self.grain_bulk_modulus,
            "fluid_density": self.fluid_density,
            "storage": self.storage,
            "gravity": list(self.gravity),
        }
