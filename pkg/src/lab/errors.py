"""Exception hierarchy for the numerical core."""

from typing import Any, Dict, List, Optional


class LabError(Exception):
    """Base class for every error raised by fhlab."""


class DomainError(LabError, ValueError):
    """Argument outside the domain of an operation."""


class StructuralError(LabError):
    """Shape, grid or region mismatch."""


class DegeneracyError(LabError):
    """A height H(U, r) vanished where it must be positive."""

    def __init__(self, message: str, r: Optional[float] = None):
        super().__init__(message)
        self.r = r


class QuadratureDivergenceError(LabError):
    """Subordination quadrature failed its node-doubling estimate."""

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate


class ExtrapolationError(LabError):
    """Richardson tail of the y -> 0 limit is not monotone."""


class PreconditionError(LabError):
    """Input data violates an operation precondition."""

    def __init__(self, message: str, location: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.location = location or {}


class ConfigError(LabError):
    """Scenario or configuration problem, with per-field diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []

    def __str__(self) -> str:
        if not self.diagnostics:
            return super().__str__()
        lines = "\n".join(f"  - {d}" for d in self.diagnostics)
        return f"{super().__str__()}\n{lines}"
