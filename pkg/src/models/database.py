"""Run ledger models and configuration."""

import json
import logging
import os
from datetime import datetime, timezone
from typing import List, Optional

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine
from sqlalchemy.orm import Session, declarative_base, relationship, sessionmaker

from .scenario import RunReport

Base = declarative_base()
logger = logging.getLogger(__name__)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True)
    scenario = Column(String(255), nullable=False, index=True)
    tool_version = Column(String(50))
    status = Column(String(20), nullable=False)  # 'pass' or 'fail'
    exit_code = Column(Integer, default=0)
    threads = Column(Integer, default=1)
    out_dir = Column(String(1000))
    wall_clock = Column(Float, default=0.0)
    config = Column(Text)  # JSON echo of the scenario
    created_at = Column(DateTime, default=_utcnow)

    experiments = relationship("ExperimentRecord", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self) -> str:
        return f"<RunRecord(id={self.id}, scenario={self.scenario}, status={self.status})>"


class ExperimentRecord(Base):
    __tablename__ = "experiments"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False, index=True)
    experiment_id = Column(String(255), nullable=False)
    kind = Column(String(50), nullable=False)
    status = Column(String(20), nullable=False)  # 'pass', 'fail' or 'report-only'
    metrics = Column(Text)  # JSON serialized metrics
    wall_clock = Column(Float, default=0.0)

    run = relationship("RunRecord", back_populates="experiments")

    def __repr__(self) -> str:
        return f"<ExperimentRecord(run_id={self.run_id}, id={self.experiment_id}, status={self.status})>"


class DatabaseManager:
    def __init__(self, database_url: Optional[str] = None):
        self.database_url = database_url or os.getenv("FHLAB_DATABASE_URL", "sqlite:///fhlab_runs.db")
        self.engine = create_engine(self.database_url, echo=False)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)

    def create_tables(self) -> None:
        """Create all tables."""
        Base.metadata.create_all(bind=self.engine)

    def get_session(self) -> Session:
        """Get database session."""
        return self.SessionLocal()

    def record_run(self, report: RunReport, out_dir: str) -> int:
        """Store a finished run and its experiments. Returns the run id."""
        session = self.get_session()
        try:
            run = RunRecord(
                scenario=report.scenario,
                tool_version=report.tool_version,
                status="fail" if report.exit_code else "pass",
                exit_code=report.exit_code,
                threads=report.threads,
                out_dir=out_dir,
                wall_clock=report.wall_clock,
                config=json.dumps(report.config, sort_keys=True),
            )
            for result in report.experiments:
                run.experiments.append(
                    ExperimentRecord(
                        experiment_id=result.experiment_id,
                        kind=result.kind,
                        status=result.status,
                        metrics=json.dumps(result.metrics, sort_keys=True, default=str),
                        wall_clock=result.wall_clock,
                    )
                )
            session.add(run)
            session.commit()
            session.refresh(run)
            return run.id
        except Exception as e:
            session.rollback()
            logger.error(f"Error recording run: {e}", exc_info=True)
            raise
        finally:
            session.close()

    def list_runs(self, limit: int = 20, scenario: Optional[str] = None) -> List[RunRecord]:
        """Most recent runs first."""
        session = self.get_session()
        try:
            query = session.query(RunRecord)
            if scenario:
                query = query.filter(RunRecord.scenario == scenario)
            return query.order_by(RunRecord.id.desc()).limit(limit).all()
        finally:
            session.close()

    def get_run_experiments(self, run_id: int) -> List[ExperimentRecord]:
        """Experiments of one run in declaration order."""
        session = self.get_session()
        try:
            return (
                session.query(ExperimentRecord)
                .filter(ExperimentRecord.run_id == run_id)
                .order_by(ExperimentRecord.id)
                .all()
            )
        finally:
            session.close()
