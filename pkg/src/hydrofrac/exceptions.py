"""Exception types raised by hydrofrac."""

from typing import Optional


class HydrofracError(Exception):
    """Base class for all hydrofrac errors."""


class ConfigurationError(HydrofracError, ValueError):
    """Invalid scenario configuration or model parameters."""


class SolverError(HydrofracError):
    """A linear or nonlinear solve failed."""


class ConvergenceError(SolverError):
    """Adaptive dynamic relaxation did not reach its tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual: Optional[float] = None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
