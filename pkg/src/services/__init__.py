"""Services module."""

from .config import Settings, get_settings
from .context import ScenarioContext, build_context
from .experiments import HANDLERS, Outcome
from .reporting import ReportWriter, read_manifest
from .runner import ExperimentRunner
from .scenarios import BUILTIN_SCENARIOS, builtin_names, load_scenario, scenario_from_mapping

__all__ = [
    "BUILTIN_SCENARIOS",
    "ExperimentRunner",
    "HANDLERS",
    "Outcome",
    "ReportWriter",
    "ScenarioContext",
    "Settings",
    "build_context",
    "builtin_names",
    "get_settings",
    "load_scenario",
    "read_manifest",
    "scenario_from_mapping",
]
