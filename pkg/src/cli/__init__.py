"""Command-line interface."""

from .app import build_parser, main
from .commands import DEFAULT_SCENARIOS, dispatch, select_experiments

__all__ = ["DEFAULT_SCENARIOS", "build_parser", "dispatch", "main", "select_experiments"]
