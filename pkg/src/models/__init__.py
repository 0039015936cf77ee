"""Models module."""

from .database import DatabaseManager, ExperimentRecord, RunRecord
from .scenario import EXPERIMENT_KINDS, ExperimentResult, FieldSpec, PotentialSpec, RunReport, Scenario

__all__ = [
    "DatabaseManager",
    "EXPERIMENT_KINDS",
    "ExperimentRecord",
    "ExperimentResult",
    "FieldSpec",
    "PotentialSpec",
    "RunRecord",
    "RunReport",
    "Scenario",
]
