"""Scenario runner: builds the shared context, runs experiments in a worker pool
and flushes their outputs in declaration order."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import pandas as pd

from .. import __version__
from ..lab.errors import ConfigError, LabError
from ..models import DatabaseManager
from ..models.scenario import ExperimentResult, RunReport, Scenario
from .context import ScenarioContext, build_context
from .experiments import Outcome, handler_for, jsonable
from .reporting import ReportWriter

logger = logging.getLogger(__name__)


class ExperimentRunner:
    def __init__(
        self,
        threads: int = 1,
        tolerance_scale: float = 1.0,
        seed: Optional[int] = None,
        database_url: Optional[str] = None,
    ):
        if threads < 1:
            raise ConfigError(f"threads must be at least 1, got {threads}")
        if not tolerance_scale > 0:
            raise ConfigError(f"tolerance scale must be positive, got {tolerance_scale}")
        self.threads = threads
        self.tolerance_scale = tolerance_scale
        self.seed = seed
        self.database_url = database_url

    def prepare(self, scenario: Scenario) -> ScenarioContext:
        try:
            return build_context(scenario)
        except ConfigError:
            raise
        except LabError as e:
            location = getattr(e, "location", None)
            diagnostics = [str(e)] + ([f"location: {location}"] if location else [])
            raise ConfigError(f"scenario {scenario.name!r} cannot be set up", diagnostics) from e

    def _execute(self, ctx: ScenarioContext, experiment_id: str, experiment: Any) -> Tuple[ExperimentResult, dict]:
        handler = handler_for(experiment.kind)
        started = time.perf_counter()
        frames: dict = {}
        try:
            logger.info(f"Running experiment {experiment_id}")
            outcome: Outcome = handler(ctx, experiment, self.tolerance_scale)
            frames = outcome.frames
            result = ExperimentResult(
                experiment_id=experiment_id,
                kind=experiment.kind,
                status=outcome.status,
                metrics=jsonable(outcome.metrics),
            )
        except Exception as e:
            logger.error(f"Experiment {experiment_id} failed: {e}")
            result = ExperimentResult(
                experiment_id=experiment_id,
                kind=experiment.kind,
                status="fail",
                error=f"{type(e).__name__}: {e}",
            )
        result.wall_clock = time.perf_counter() - started
        logger.info(f"Experiment {experiment_id}: {result.status}")
        return result, frames

    def run(self, scenario: Scenario, out_dir: Union[str, Path]) -> RunReport:
        """Run every experiment of the scenario and write its outputs."""
        started_at = datetime.now(timezone.utc)
        started = time.perf_counter()
        if self.seed is not None:
            scenario = scenario.model_copy(update={"seed": self.seed})
        ctx = self.prepare(scenario)
        ids = scenario.experiment_ids()
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [
                pool.submit(self._execute, ctx, experiment_id, experiment)
                for experiment_id, experiment in zip(ids, scenario.experiments)
            ]
            outcomes: List[Tuple[ExperimentResult, dict]] = [future.result() for future in futures]

        writer = ReportWriter(out_dir)
        results = []
        for result, frames in outcomes:
            if frames:
                result.outputs = writer.write_frames(result.experiment_id, frames)
            results.append(result)

        report = RunReport(
            scenario=scenario.name,
            tool_version=__version__,
            started_at=started_at,
            wall_clock=time.perf_counter() - started,
            threads=self.threads,
            config=scenario.model_dump(mode="json"),
            experiments=results,
        )
        writer.write_report(report)
        writer.write_manifest()
        self._record(report, out_dir)
        failed = [r.experiment_id for r in report.failed]
        if failed:
            logger.warning(f"Scenario {scenario.name}: failed experiments {failed}")
        else:
            logger.info(f"Scenario {scenario.name}: all experiments passed or reported")
        return report

    def _record(self, report: RunReport, out_dir: Union[str, Path]) -> Optional[int]:
        if not self.database_url:
            return None
        try:
            db = DatabaseManager(self.database_url)
            db.create_tables()
            return db.record_run(report, str(out_dir))
        except Exception as e:
            logger.warning(f"Run ledger unavailable: {e}")
            return None


def frames_of(report: RunReport, out_dir: Union[str, Path]) -> List[pd.DataFrame]:
    """Reload the CSV tables a report lists, in order."""
    return [pd.read_csv(Path(out_dir) / name) for result in report.experiments for name in result.outputs]
