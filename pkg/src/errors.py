"""
Exception hierarchy for the GCME toolkit.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Any, Dict, List, Optional


class GcmeError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(GcmeError, ValueError):
    """Input outside the domain of an operation (non-finite, wrong shape, ...)."""


class GridMismatchError(DomainError):
    """Two fields that must share a grid do not."""


class ScenarioError(DomainError):
    """Unknown scenario generator or invalid generator parameter."""


class PathError(DomainError):
    """A transport path leaves the grid or two paths do not share endpoints."""


class ConfigError(GcmeError, ValueError):
    """Unreadable or invalid run configuration."""


class ToleranceFailure(GcmeError):
    """A configured tolerance was exceeded."""

    def __init__(self, message: str, deviations: Optional[Dict[str, float]] = None):
        super().__init__(message)
        self.deviations = deviations or {}


class IdentityViolation(ToleranceFailure):
    """A reduction identity does not hold to tolerance."""

    def __init__(self, label: str, deviation: float, tolerance: float):
        super().__init__(
            f"Identity {label} violated: deviation {deviation:.3e} > {tolerance:.1e}",
            {label: deviation},
        )
        self.label = label
        self.deviation = deviation
        self.tolerance = tolerance


class CalibrationFailure(GcmeError):
    """No sign-convention candidate passed every calibration check."""

    def __init__(self, message: str, table: List[Dict[str, Any]]):
        super().__init__(message)
        self.table = table


class CalibrationAmbiguity(GcmeError):
    """More than one sign-convention candidate passed every calibration check."""

    def __init__(self, message: str, candidates: List[Dict[str, Any]]):
        super().__init__(message)
        self.candidates = candidates
