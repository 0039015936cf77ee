import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli import main
from src.lab.errors import ConfigError
from src.models.scenario import RunReport
from src.services.reporting import MANIFEST_NAME, REPORT_NAME, TIMING_NAME, read_manifest, sha256_file
from src.services.runner import ExperimentRunner, frames_of
from src.services.scenarios import load_scenario, scenario_from_mapping

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

FAILING_SCENARIO = """
name = "wrong-order"
s = 0.5

[field]
kind = "builtin"
name = "x1"

[[experiments]]
kind = "vanishing-order"
expected_order = 5.0
"""


@pytest.fixture(autouse=True)
def no_ledger(monkeypatch):
    monkeypatch.delenv("FHLAB_DATABASE_URL", raising=False)


def test_linear_frequency_run(tmp_path):
    scenario = load_scenario("builtin:x1-frequency")
    report = ExperimentRunner().run(scenario, tmp_path)
    assert report.exit_code == 0
    (result,) = report.experiments
    assert result.experiment_id == "00-frequency"
    assert result.status == "pass"
    assert result.metrics["N_min"] == pytest.approx(0.5, abs=1e-6)
    assert result.metrics["N_max"] == pytest.approx(0.5, abs=1e-6)
    assert result.metrics["monotone"]
    assert result.outputs == ["00-frequency.csv", "00-frequency-first-variation.csv"]
    curve = pd.read_csv(tmp_path / "00-frequency.csv")
    assert len(curve) == len(scenario.experiments[0].radii_length)
    assert (curve["N"] - 0.5).abs().max() <= 1e-6
    assert len(frames_of(report, tmp_path)) == 2


def test_outputs_are_listed_in_the_manifest(tmp_path):
    report = ExperimentRunner().run(load_scenario("builtin:counterexample"), tmp_path)
    manifest = read_manifest(tmp_path / MANIFEST_NAME)
    expected = {name for result in report.experiments for name in result.outputs} | {REPORT_NAME}
    assert set(manifest) == expected
    for name, digest in manifest.items():
        assert sha256_file(tmp_path / name) == digest


def test_thread_count_does_not_change_outputs(tmp_path):
    scenario = load_scenario("builtin:counterexample")
    serial = ExperimentRunner(threads=1).run(scenario, tmp_path / "serial")
    pooled = ExperimentRunner(threads=3).run(scenario, tmp_path / "pooled")
    assert [r.status for r in serial.experiments] == [r.status for r in pooled.experiments]
    a = read_manifest(tmp_path / "serial" / MANIFEST_NAME)
    b = read_manifest(tmp_path / "pooled" / MANIFEST_NAME)
    assert REPORT_NAME in a
    assert a == b


def test_timing_stays_out_of_the_manifest(tmp_path):
    report = ExperimentRunner(threads=2).run(load_scenario("builtin:counterexample"), tmp_path)
    assert TIMING_NAME not in read_manifest(tmp_path / MANIFEST_NAME)
    timing = json.loads((tmp_path / TIMING_NAME).read_text(encoding="utf-8"))
    assert timing["threads"] == 2
    assert set(timing["experiments"]) == {"00-origin", "01-past"}
    saved = json.loads((tmp_path / REPORT_NAME).read_text(encoding="utf-8"))
    assert "wall_clock" not in saved and "started_at" not in saved
    assert all("wall_clock" not in result for result in saved["experiments"])
    assert report.wall_clock > 0


def test_report_echoes_the_scenario(tmp_path):
    scenario = load_scenario("builtin:counterexample")
    report = ExperimentRunner(seed=7).run(scenario, tmp_path)
    back = RunReport.model_validate_json((tmp_path / REPORT_NAME).read_text(encoding="utf-8"))
    echoed = back.echoed_scenario()
    assert echoed.seed == 7
    assert echoed.model_copy(update={"seed": scenario.seed}) == scenario
    assert [r.model_dump() for r in back.experiments] == [r.model_dump() for r in report.experiments]


def test_runner_options_are_validated():
    with pytest.raises(ConfigError):
        ExperimentRunner(threads=0)
    with pytest.raises(ConfigError):
        ExperimentRunner(tolerance_scale=0.0)


def test_failed_experiment_is_reported(tmp_path):
    path = tmp_path / "wrong.toml"
    path.write_text(FAILING_SCENARIO, encoding="utf-8")
    report = ExperimentRunner().run(load_scenario(str(path)), tmp_path / "out")
    assert report.exit_code == 1
    assert report.failed[0].metrics["order"] == pytest.approx(1.0, abs=1e-6)


def test_experiment_errors_become_failures(tmp_path):
    # op-check needs sampled boundary data
    data = load_scenario("builtin:x1-frequency").model_dump(mode="json")
    data["experiments"] = [{"kind": "op-check"}]
    report = ExperimentRunner().run(scenario_from_mapping(data), tmp_path)
    (result,) = report.experiments
    assert result.status == "fail"
    assert result.error.startswith("PreconditionError")
    assert report.exit_code == 1


def test_modes_field_without_potential_keeps_the_energy_identity(tmp_path):
    data = {
        "name": "cosine-no-potential",
        "s": 0.5,
        "field": {"kind": "modes", "modes": [{"k": [0], "m": 0, "re": 2.0}, {"k": [1], "m": 0, "re": 0.5}]},
        "experiments": [{"kind": "frequency", "radii_length": [0.1, 0.2, 0.3, 0.4]}],
    }
    report = ExperimentRunner().run(scenario_from_mapping(data), tmp_path)
    (result,) = report.experiments
    assert result.error is None, result.error
    assert result.metrics["identity_gap"] <= 1e-6


def test_harnack_psi_runs_end_to_end(tmp_path):
    data = load_scenario("builtin:manufactured").model_dump(mode="json")
    data["experiments"] = [{"kind": "harnack", "psi_value": 0.5}]
    report = ExperimentRunner().run(scenario_from_mapping(data), tmp_path)
    (result,) = report.experiments
    assert result.error is None, result.error
    assert result.status == "report-only"
    assert result.metrics["potential_shift"] > 0
    assert result.metrics["equation_residual"] <= 1e-6


def test_manufactured_chain(tmp_path):
    scenario = load_scenario(str(SCENARIO_DIR / "full-chain.toml"))
    report = ExperimentRunner(threads=2).run(scenario, tmp_path)
    assert [r.kind for r in report.experiments] == ["op-check", "extend-check", "frequency", "blowup"]
    for result in report.experiments:
        assert result.error is None, result.error
        assert result.outputs
        for name in result.outputs:
            assert (tmp_path / name).is_file()
    assert report.experiments[0].metrics["orders"] == [0.5]


def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["frequency", "--config", "builtin:x1-frequency", "--out-dir", out]) == 0
    assert "00-frequency" in capsys.readouterr().out

    wrong = tmp_path / "wrong.toml"
    wrong.write_text(FAILING_SCENARIO, encoding="utf-8")
    assert main(["run", "--config", str(wrong), "--out-dir", out]) == 1

    assert main(["run", "--config", str(tmp_path / "missing.toml"), "--out-dir", out]) == 2
    assert main(["run", "--out-dir", out]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text(FAILING_SCENARIO.replace("s = 0.5", "s = 1.5"), encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out-dir", out]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_subcommand_uses_default_scenario(tmp_path, capsys):
    assert main(["vanishing-order", "--out-dir", str(tmp_path)]) == 0
    printed = capsys.readouterr().out
    assert "00-origin" in printed and "01-past" in printed
    report = json.loads((tmp_path / REPORT_NAME).read_text(encoding="utf-8"))
    assert report["scenario"] == "counterexample"
    assert report["experiments"][1]["metrics"]["infinite"] is True


def test_cli_tolerance_scale(tmp_path):
    # order 1 against an expected 1.2 passes only once the tolerance is widened
    path = tmp_path / "loose.toml"
    path.write_text(FAILING_SCENARIO.replace("5.0", "1.2"), encoding="utf-8")
    assert main(["run", "--config", str(path), "--out-dir", str(tmp_path / "a")]) == 1
    assert main(["run", "--config", str(path), "--out-dir", str(tmp_path / "b"), "--tolerance-scale", "10"]) == 0


def test_show_builtins(capsys):
    assert main(["show-builtins"]) == 0
    printed = capsys.readouterr().out
    assert "builtin:x1-frequency" in printed
    assert "counterexample_f" in printed


def test_history_needs_a_ledger(capsys):
    assert main(["history"]) == 2
