"""
Closed-form reference solutions for the benchmarks.

Series are evaluated vectorised over the evaluation points and truncated
at ``n_terms``; ``truncated_sum`` stops earlier once the trailing term is
negligible against the running sum at every point.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..exceptions import ConfigurationError
from ..models import FlowMaterial, SolidMaterial

logger = logging.getLogger(__name__)

DEFAULT_TERMS = 500
TAIL_TOLERANCE = 1e-12

ArrayLike = Union[float, np.ndarray]


def truncated_sum(terms: np.ndarray, tolerance: float = TAIL_TOLERANCE) -> np.ndarray:
    """
    Sum ``terms`` (shape (n_terms, ...)) along the first axis.

    Stops at the first term whose magnitude is below ``tolerance`` times the
    running sum everywhere; otherwise all terms are used.
    """
    partial = np.cumsum(terms, axis=0)
    scale = np.maximum(np.abs(partial), np.finfo(float).tiny)
    negligible = np.all((np.abs(terms) <= tolerance * scale).reshape(len(terms), -1), axis=1)
    hits = np.flatnonzero(negligible)
    if len(hits):
        return partial[hits[0]]
    return partial[-1]


# ---- One-dimensional consolidation ----

@dataclass
class ConsolidationParams:
    """
    Constants of the one-dimensional consolidation column.

    ``compliance`` is the drained constrained compliance a [1/Pa]; the
    loaded end x = 0 is drained and x = length is fixed and impermeable.
    """

    biot: float
    storage: float
    permeability: float
    viscosity: float
    length: float
    load: float
    compliance: float = 1e-8
    n_terms: int = DEFAULT_TERMS

    @property
    def undrained_compliance(self) -> float:
        """b = a / (1 + a alpha^2 / S)."""
        return self.compliance / (1.0 + self.compliance * self.biot ** 2 / self.storage)

    @property
    def pressure_ratio(self) -> float:
        """v = (a - b) / (a alpha); the undrained pressure is v P0."""
        a, b = self.compliance, self.undrained_compliance
        return (a - b) / (a * self.biot)

    @property
    def consolidation_coefficient(self) -> float:
        """c = k / ((a alpha^2 + S) mu_w)."""
        a = self.compliance
        return self.permeability / ((a * self.biot ** 2 + self.storage) * self.viscosity)

    @property
    def coupling_compliance(self) -> float:
        """c_m = (a - b) / v."""
        return (self.compliance - self.undrained_compliance) / self.pressure_ratio

    @classmethod
    def from_materials(
        cls, solid: SolidMaterial, flow: FlowMaterial, length: float, load: float, n_terms: int = DEFAULT_TERMS
    ) -> "ConsolidationParams":
        return cls(
            biot=flow.biot,
            storage=flow.storage_coefficient,
            permeability=flow.permeability,
            viscosity=flow.viscosity,
            length=length,
            load=load,
            compliance=1.0 / solid.constrained_modulus,
            n_terms=n_terms,
        )

    def validate(self) -> None:
        for name in ("storage", "permeability", "viscosity", "length", "compliance"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.biot == 0:
            raise ConfigurationError("biot must be non-zero for the consolidation series")
        if self.n_terms < 1:
            raise ConfigurationError(f"n_terms must be >= 1, got {self.n_terms}")


def _mode_factors(x: np.ndarray, t: float, params: ConsolidationParams):
    params.validate()
    if t < 0:
        raise ConfigurationError(f"t must be >= 0, got {t}")
    if np.any(x < 0) or np.any(x > params.length * (1 + 1e-12)):
        raise ConfigurationError(f"x must lie in [0, {params.length}]")
    odd = 2 * np.arange(params.n_terms)[:, None] + 1
    wavenumber = odd * math.pi / (2.0 * params.length)
    decay = np.exp(-(wavenumber ** 2) * params.consolidation_coefficient * t)
    return odd, wavenumber * x[None, :], decay


def consolidation_pressure(x: ArrayLike, t: float, params: ConsolidationParams) -> ArrayLike:
    """Pore pressure p(x, t) [Pa] of the consolidating column."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    odd, phase, decay = _mode_factors(x, t, params)
    series = truncated_sum(decay / odd * np.sin(phase))
    p = 4.0 * params.pressure_ratio * params.load / math.pi * series
    return float(p[0]) if scalar else p


def consolidation_displacement(x: ArrayLike, t: float, params: ConsolidationParams) -> ArrayLike:
    """Displacement u(x, t) [m] towards the fixed end; u(L, t) = 0."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    odd, phase, decay = _mode_factors(x, t, params)
    series = truncated_sum(decay / odd ** 2 * np.cos(phase))
    L, P0 = params.length, params.load
    drained = params.coupling_compliance * params.pressure_ratio * P0 * (L - x - 8.0 * L / math.pi ** 2 * series)
    u = drained + params.undrained_compliance * P0 * (L - x)
    return float(u[0]) if scalar else u


# ---- Pressure diffusion along a single crack ----

def crack_pressure_profile(zeta: ArrayLike, T_d: float, n_terms: int = DEFAULT_TERMS) -> ArrayLike:
    """
    P/P0 along a crack pressurised at one end.

    ``zeta = (L - x) / L``: zeta = 1 is the pressurised edge (P/P0 = 1) and
    zeta = 0 the closed far end.
    """
    if not T_d > 0:
        raise ConfigurationError(f"T_d must be positive, got {T_d}")
    scalar = np.ndim(zeta) == 0
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if np.any(zeta < 0) or np.any(zeta > 1):
        raise ConfigurationError("zeta must lie in [0, 1]")
    n = np.arange(n_terms)[:, None]
    odd = 2 * n + 1
    terms = (
        np.exp(-(odd ** 2) * (T_d / 4.0) * math.pi ** 2)
        * np.cos(odd * math.pi / 2.0 * zeta[None, :])
        * np.where(n % 2 == 0, -1.0, 1.0)
        / odd
    )
    ratio = 1.0 + 4.0 / math.pi * truncated_sum(terms)
    return float(ratio[0]) if scalar else ratio


def dimensionless_time(t: float, aperture: float, fluid_bulk_modulus: float, viscosity: float, length: float) -> float:
    """T_d = K_w (a^2 / (12 mu_w)) t / L^2."""
    return fluid_bulk_modulus * aperture ** 2 / (12.0 * viscosity) * t / length ** 2


def time_for_dimensionless(T_d: float, aperture: float, fluid_bulk_modulus: float, viscosity: float, length: float) -> float:
    return T_d / dimensionless_time(1.0, aperture, fluid_bulk_modulus, viscosity, length)


# ---- Pressurised crack opening ----

def sneddon_opening(x: ArrayLike, p: float, half_length: float, E: float, nu: float) -> ArrayLike:
    """
    Crack-face displacement 2 p l_c / E' sqrt(1 - x^2 / l_c^2), E' = E / (1 - nu^2).

    Raises:
        ConfigurationError: |x| > l_c
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > half_length * (1 + 1e-12)):
        raise ConfigurationError(f"|x| must not exceed the half crack length {half_length}")
    E_p = E / (1.0 - nu ** 2)
    u = 2.0 * p * half_length / E_p * np.sqrt(np.clip(1.0 - (x / half_length) ** 2, 0.0, None))
    return float(u) if u.ndim == 0 else u


# ---- Damage of a neighbourhood crossed by a straight crack ----

def continuum_damage(h: ArrayLike, horizon: float) -> ArrayLike:
    """
    Area fraction of a horizon disc cut off by a crack at distance h.

    Raises:
        ConfigurationError: h outside [0, horizon]
    """
    h = np.asarray(h, dtype=float)
    if np.any(h < 0) or np.any(h > horizon * (1 + 1e-12)):
        raise ConfigurationError(f"h must lie in [0, {horizon}]")
    r = np.clip(h / horizon, 0.0, 1.0)
    phi = (np.arccos(2.0 * r ** 2 - 1.0) - 2.0 * r * np.sqrt(1.0 - r ** 2)) / (2.0 * math.pi)
    return float(phi) if phi.ndim == 0 else phi
