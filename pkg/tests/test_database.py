import json

import pytest

from src.cli import main
from src.models import DatabaseManager
from src.services.runner import ExperimentRunner
from src.services.scenarios import load_scenario


@pytest.fixture
def database_url(tmp_path):
    return f"sqlite:///{tmp_path / 'runs.db'}"


def test_runs_are_recorded(tmp_path, database_url):
    runner = ExperimentRunner(database_url=database_url)
    report = runner.run(load_scenario("builtin:counterexample"), tmp_path / "out")

    db = DatabaseManager(database_url)
    runs = db.list_runs()
    assert len(runs) == 1
    run = runs[0]
    assert run.scenario == "counterexample"
    assert run.status == "pass"
    assert run.exit_code == report.exit_code == 0
    assert json.loads(run.config)["name"] == "counterexample"

    experiments = db.get_run_experiments(run.id)
    assert [e.experiment_id for e in experiments] == ["00-origin", "01-past"]
    assert json.loads(experiments[1].metrics)["infinite"] is True


def test_runs_are_listed_newest_first(tmp_path, database_url):
    runner = ExperimentRunner(database_url=database_url)
    runner.run(load_scenario("builtin:counterexample"), tmp_path / "a")
    runner.run(load_scenario("builtin:caloric-vanishing"), tmp_path / "b")

    db = DatabaseManager(database_url)
    assert [run.scenario for run in db.list_runs()] == ["caloric-vanishing", "counterexample"]
    assert [run.scenario for run in db.list_runs(limit=1)] == ["caloric-vanishing"]
    assert [run.scenario for run in db.list_runs(scenario="counterexample")] == ["counterexample"]


def test_no_ledger_without_url(tmp_path):
    ExperimentRunner().run(load_scenario("builtin:counterexample"), tmp_path)
    assert not list(tmp_path.glob("*.db"))


def test_unreachable_ledger_does_not_fail_the_run(tmp_path):
    runner = ExperimentRunner(database_url=f"sqlite:///{tmp_path / 'missing' / 'dir' / 'runs.db'}")
    report = runner.run(load_scenario("builtin:counterexample"), tmp_path / "out")
    assert report.exit_code == 0


def test_history_command(tmp_path, database_url, monkeypatch, capsys):
    monkeypatch.setenv("FHLAB_DATABASE_URL", database_url)
    assert main(["history"]) == 0
    assert "no recorded runs" in capsys.readouterr().out

    assert main(["vanishing-order", "--out-dir", str(tmp_path / "out")]) == 0
    capsys.readouterr()
    assert main(["history", "--verbose"]) == 0
    printed = capsys.readouterr().out
    assert "counterexample" in printed
    assert "00-origin" in printed
