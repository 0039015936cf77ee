"""Subcommand handlers. Each returns a process exit code."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd

from ..lab.errors import ConfigError
from ..lab.fracheat import FracConfig
from ..lab.solutions import BUILTIN_FIELDS, builtin_field
from ..models import DatabaseManager
from ..models.scenario import EXPERIMENT_KINDS, RunReport, Scenario
from ..services.config import Settings
from ..services.runner import ExperimentRunner
from ..services.scenarios import BUILTIN_PREFIX, BUILTIN_SCENARIOS, builtin_names, load_scenario, scenario_from_mapping

logger = logging.getLogger(__name__)

# scenario used by a subcommand when no --config is given
DEFAULT_SCENARIOS = {
    "op-check": "op-check-five-mode",
    "extend-check": "op-check-five-mode",
    "frequency": "x1-frequency",
    "blowup": "superposition",
    "harnack": "manufactured",
    "vanishing-order": "counterexample",
    "calibrate-C": "manufactured",
}


def select_experiments(scenario: Scenario, kind: str) -> Scenario:
    """Keep the scenario's experiments of one kind, or add a default one when it has none."""
    data = scenario.model_dump(mode="json")
    chosen = [exp for exp in data["experiments"] if exp["kind"] == kind]
    data["experiments"] = chosen or [EXPERIMENT_KINDS[kind]().model_dump(mode="json")]
    return scenario_from_mapping(data, f"{scenario.name} ({kind})")


def _runner(args: argparse.Namespace, settings: Settings) -> ExperimentRunner:
    return ExperimentRunner(
        threads=args.threads if args.threads is not None else settings.threads,
        tolerance_scale=args.tolerance_scale if args.tolerance_scale is not None else settings.tolerance_scale,
        seed=args.seed if args.seed is not None else settings.seed,
        database_url=settings.database_url,
    )


def print_report(report: RunReport, out_dir: str) -> None:
    print(f"scenario {report.scenario}  (fhlab {report.tool_version}, {report.threads} thread(s))")
    for result in report.experiments:
        line = f"  {result.experiment_id:<32} {result.kind:<16} {result.status}"
        if result.error:
            line += f"  [{result.error}]"
        print(line)
        if result.kind == "calibrate-C":
            print(f"    C = {result.metrics.get('C')}")
    print(f"outputs in {out_dir}")


def print_calibration(out_dir: str, report: RunReport) -> None:
    """Echo the sampled psi(r) values next to the calibrated C."""
    for result in report.experiments:
        if result.kind != "calibrate-C" or not result.outputs:
            continue
        frame = pd.read_csv(Path(out_dir) / result.outputs[0])
        print(frame.to_string(index=False))


def cmd_run(args: argparse.Namespace, settings: Settings, kind: Optional[str] = None) -> int:
    ref = args.config
    if ref is None:
        if kind is None:
            raise ConfigError("run needs --config <file.toml | builtin:<name>>")
        ref = BUILTIN_PREFIX + DEFAULT_SCENARIOS[kind]
        logger.info(f"No --config given, using {ref}")
    scenario = load_scenario(ref)
    if kind is not None:
        scenario = select_experiments(scenario, kind)
    out_dir = args.out_dir or settings.out_dir
    report = _runner(args, settings).run(scenario, out_dir)
    print_report(report, out_dir)
    if kind == "calibrate-C":
        print_calibration(out_dir, report)
    return report.exit_code


def cmd_history(args: argparse.Namespace, settings: Settings) -> int:
    url = args.database_url or settings.database_url
    if not url:
        raise ConfigError("run ledger disabled", ["set FHLAB_DATABASE_URL or pass --database-url"])
    db = DatabaseManager(url)
    db.create_tables()
    runs = db.list_runs(limit=args.limit, scenario=args.scenario)
    if not runs:
        print("no recorded runs")
        return 0
    for run in runs:
        print(f"{run.id:>5}  {run.created_at:%Y-%m-%d %H:%M:%S}  {run.scenario:<28} {run.status:<5} {run.out_dir}")
        if args.verbose:
            for exp in db.get_run_experiments(run.id):
                print(f"         {exp.experiment_id:<32} {exp.kind:<16} {exp.status}")
    return 0


def cmd_show_builtins(args: argparse.Namespace, settings: Settings) -> int:
    print("scenarios:")
    for name in builtin_names():
        kinds = ", ".join(exp["kind"] for exp in BUILTIN_SCENARIOS[name]["experiments"])
        print(f"  {BUILTIN_PREFIX}{name:<22} [{kinds}]")
    print(f"fields (s = {args.s}):")
    cfg = FracConfig(s=args.s)
    for name in sorted(BUILTIN_FIELDS):
        field = builtin_field(name, cfg, 2 if name == "x1x2" else 1)
        print(f"  {name:<18} kappa={field.kappa}  {field.certificate}")
    return 0


def dispatch(args: argparse.Namespace, settings: Settings) -> int:
    if args.command == "run":
        return cmd_run(args, settings)
    if args.command == "history":
        return cmd_history(args, settings)
    if args.command == "show-builtins":
        return cmd_show_builtins(args, settings)
    return cmd_run(args, settings, kind=args.command)


def experiment_commands() -> List[str]:
    return list(EXPERIMENT_KINDS)
