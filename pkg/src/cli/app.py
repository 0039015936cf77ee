"""Command-line application."""

import argparse
import logging
import sys
from typing import List, Optional

from .. import __version__
from ..lab.errors import ConfigError
from ..services.config import get_settings
from .commands import dispatch, experiment_commands

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Scenario TOML file or builtin:<name>")
    common.add_argument("--out-dir", help="Output directory (default: FHLAB_OUT_DIR or ./results)")
    common.add_argument("--threads", type=int, help="Worker threads (default: FHLAB_THREADS or 1)")
    common.add_argument("--seed", type=int, help="Override the scenario seed for random fields")
    common.add_argument(
        "--tolerance-scale",
        type=float,
        help="Multiply every pass/fail tolerance (default: FHLAB_TOLERANCE_SCALE or 1)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhlab",
        description="Numerical lab for the fractional heat operator, its extension and frequency functionals",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    sub.add_parser("run", parents=[common], help="Run every experiment of a scenario")
    for kind in experiment_commands():
        sub.add_parser(kind, parents=[common], help=f"Run the {kind} experiments of a scenario")

    history = sub.add_parser("history", help="List runs recorded in the ledger")
    history.add_argument("--database-url", help="SQLAlchemy URL (default: FHLAB_DATABASE_URL)")
    history.add_argument("--limit", type=int, default=20)
    history.add_argument("--scenario", help="Only runs of this scenario")
    history.add_argument("--verbose", action="store_true", help="Also list each run's experiments")

    builtins = sub.add_parser("show-builtins", help="List builtin scenarios and closed-form fields")
    builtins.add_argument("--s", type=float, default=0.5, help="Order used to print the field certificates")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch and map errors to exit codes {0, 1, 2}."""
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    try:
        return dispatch(args, settings)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
