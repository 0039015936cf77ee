from pathlib import Path

import pytest

from src.cli.commands import select_experiments
from src.lab.errors import ConfigError
from src.models.scenario import BlowupExperiment, FrequencyExperiment, Scenario
from src.services.context import build_context
from src.services.scenarios import builtin_names, load_scenario, scenario_from_mapping

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def minimal(**overrides):
    data = {
        "name": "minimal",
        "s": 0.5,
        "field": {"kind": "builtin", "name": "x1"},
        "experiments": [{"kind": "frequency"}],
    }
    data.update(overrides)
    return data


@pytest.mark.parametrize("name", builtin_names())
def test_builtin_scenarios_validate(name):
    scenario = load_scenario(f"builtin:{name}")
    assert scenario.name == name
    assert len(scenario.experiment_ids()) == len(scenario.experiments)


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_scenario_files_validate(path):
    scenario = load_scenario(str(path))
    assert scenario.experiments


def test_defaults_are_filled_in():
    scenario = scenario_from_mapping(minimal())
    assert scenario.seed == 0
    assert scenario.grid.dim == 1
    assert scenario.potential.mode == "none"
    exp = scenario.experiments[0]
    assert isinstance(exp, FrequencyExperiment)
    assert exp.radii_length[0] == pytest.approx(0.05)
    assert scenario.experiment_ids() == ["00-frequency"]


def test_experiment_labels_name_the_outputs():
    scenario = scenario_from_mapping(
        minimal(experiments=[{"kind": "frequency"}, {"kind": "blowup", "label": "zoom"}])
    )
    assert scenario.experiment_ids() == ["00-frequency", "01-zoom"]


def test_order_out_of_range_names_the_field():
    with pytest.raises(ConfigError) as excinfo:
        scenario_from_mapping(minimal(s=-0.2))
    assert any(line.startswith("s:") for line in excinfo.value.diagnostics)
    assert "s:" in str(excinfo.value)


@pytest.mark.parametrize(
    "overrides",
    [
        {"field": {"kind": "builtin", "name": "x7"}},
        {"field": {"kind": "modes"}},
        {"field": {"kind": "builtin", "name": "x1x2"}},
        {"experiments": []},
        {"experiments": [{"kind": "frequency", "radii_length": [0.2, 0.1]}]},
        {"experiments": [{"kind": "frequency", "radii_length": [0.5, 3.0]}]},
        {"experiments": [{"kind": "blowup", "radii_length": [0.1]}]},
        {"experiments": [{"kind": "teleport"}]},
        {"potential": {"mode": "manufactured"}},
        {"potential": {"mode": "explicit"}},
        {"unexpected": 1},
    ],
)
def test_invalid_scenarios(overrides):
    with pytest.raises(ConfigError):
        scenario_from_mapping(minimal(**overrides))


def test_mode_dimension_must_match_grid():
    modes = {"kind": "modes", "modes": [{"k": [1, 0], "m": 0, "re": 1.0}]}
    with pytest.raises(ConfigError):
        scenario_from_mapping(minimal(field=modes))
    scenario = scenario_from_mapping(minimal(field=modes, grid={"dim": 2, "x_points": 8, "t_points": 8}))
    assert scenario.grid.dim == 2


def test_loading_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "missing.toml"))
    with pytest.raises(ConfigError):
        load_scenario("builtin:nope")
    broken = tmp_path / "broken.toml"
    broken.write_text('name = "x"\ns = [0.5\n', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_scenario(str(broken))
    assert excinfo.value.diagnostics


def test_toml_file(tmp_path):
    path = tmp_path / "scenario.toml"
    path.write_text(
        'name = "linear"\ns = 0.3\n\n[field]\nkind = "builtin"\nname = "x1"\n\n'
        '[[experiments]]\nkind = "blowup"\nexpected_kappa = 0.5\n',
        encoding="utf-8",
    )
    scenario = load_scenario(str(path))
    assert scenario.s == pytest.approx(0.3)
    assert isinstance(scenario.experiments[0], BlowupExperiment)
    assert scenario.experiments[0].expected_kappa == 0.5


def test_select_experiments():
    manufactured = load_scenario("builtin:manufactured")
    harnack = select_experiments(manufactured, "harnack")
    assert [exp.kind for exp in harnack.experiments] == ["harnack"]
    added = select_experiments(load_scenario("builtin:x1-frequency"), "blowup")
    assert [exp.kind for exp in added.experiments] == ["blowup"]
    assert isinstance(added, Scenario)


def test_context_for_manufactured_scenario():
    ctx = build_context(load_scenario("builtin:manufactured"))
    assert ctx.spectral
    assert ctx.u is not None and ctx.potential is not None
    assert not ctx.potential.is_zero
    assert ctx.kappa is None


def test_context_for_expression_field():
    ctx = build_context(scenario_from_mapping(minimal(field={"kind": "expression", "expression": "x1", "kappa": 0.5})))
    assert not ctx.spectral
    assert ctx.kappa == 0.5


def test_expression_potential_with_unknown_symbol():
    data = minimal(
        field={"kind": "modes", "modes": [{"k": [0], "m": 0, "re": 2.0}]},
        potential={"mode": "explicit", "expression": "cos(x1) + q"},
    )
    with pytest.raises(ConfigError):
        build_context(scenario_from_mapping(data))
