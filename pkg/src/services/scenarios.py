"""Builtin scenarios and scenario loading."""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List

from pydantic import ValidationError

from ..lab.errors import ConfigError
from ..models.scenario import Scenario

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

DEFAULT_RADII = [0.05 + 0.025 * j for j in range(19)]

BUILTIN_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "x1-frequency": {
        "name": "x1-frequency",
        "s": 0.5,
        "field": {"kind": "builtin", "name": "x1"},
        "experiments": [{"kind": "frequency", "radii_length": DEFAULT_RADII}],
    },
    "one-frequency": {
        "name": "one-frequency",
        "s": 0.5,
        "field": {"kind": "builtin", "name": "one"},
        "experiments": [{"kind": "frequency", "radii_length": DEFAULT_RADII}],
    },
    "y2s-frequency": {
        "name": "y2s-frequency",
        "s": 0.25,
        "field": {"kind": "builtin", "name": "y2s"},
        "experiments": [
            {"kind": "frequency", "radii_length": DEFAULT_RADII},
            {"kind": "blowup", "radii_length": [0.4, 0.2, 0.1, 0.05, 0.025]},
        ],
    },
    "poly2-frequency": {
        "name": "poly2-frequency",
        "s": 0.5,
        "field": {"kind": "builtin", "name": "poly2"},
        "experiments": [{"kind": "frequency", "radii_length": DEFAULT_RADII}],
    },
    "x1x2-frequency": {
        "name": "x1x2-frequency",
        "s": 0.5,
        "grid": {"dim": 2, "x_points": 16, "t_points": 16},
        "field": {"kind": "builtin", "name": "x1x2"},
        "experiments": [{"kind": "frequency", "radii_length": [0.05, 0.1, 0.2, 0.3, 0.4, 0.5]}],
    },
    "superposition": {
        "name": "superposition",
        "s": 0.5,
        "field": {
            "kind": "expression",
            "expression": "x1 + 0.1*(x1**2 + y**2 + 2*(2 + a)*t)",
            "y_smooth": True,
        },
        "experiments": [
            {"kind": "frequency", "radii_length": DEFAULT_RADII},
            {
                "kind": "blowup",
                "radii_length": [0.05, 0.04, 0.03, 0.02, 0.01],
                "expected_kappa": 0.5,
                "tolerance": 5e-3,
            },
        ],
    },
    "op-check-five-mode": {
        "name": "op-check-five-mode",
        "s": 0.5,
        "field": {
            "kind": "modes",
            "modes": [
                {"k": [0], "m": 0, "re": 1.0},
                {"k": [1], "m": 0, "re": 0.5},
                {"k": [1], "m": 1, "re": 0.3, "im": 0.1},
                {"k": [2], "m": -1, "re": 0.2},
                {"k": [0], "m": 2, "re": 0.1, "im": -0.05},
            ],
        },
        "experiments": [
            {"kind": "op-check", "orders": [0.25, 0.5, 0.75]},
            {"kind": "extend-check"},
        ],
    },
    "manufactured": {
        "name": "manufactured",
        "s": 0.5,
        "field": {
            "kind": "modes",
            "modes": [
                {"k": [0], "m": 0, "re": 2.0},
                {"k": [1], "m": 0, "re": 0.5},
                {"k": [1], "m": 1, "re": 0.1},
            ],
        },
        "potential": {"mode": "manufactured"},
        "experiments": [
            {"kind": "frequency", "radii_length": DEFAULT_RADII, "calibrate": True},
            {"kind": "calibrate-C", "radii_length": DEFAULT_RADII},
            {"kind": "harnack", "radii_length": [0.1, 0.2, 0.4]},
        ],
    },
    "counterexample": {
        "name": "counterexample",
        "s": 0.5,
        "field": {"kind": "builtin", "name": "counterexample_f"},
        "experiments": [
            {"kind": "vanishing-order", "label": "origin", "expected_order": 1.0},
            {
                "kind": "vanishing-order",
                "label": "past",
                "center_time": -0.5,
                "radii_length": [0.1, 0.2, 0.3, 0.4],
                "expected_infinite": True,
            },
        ],
    },
    "caloric-vanishing": {
        "name": "caloric-vanishing",
        "s": 0.5,
        "field": {"kind": "expression", "expression": "x1**2 + 2*t", "y_smooth": True},
        "experiments": [{"kind": "vanishing-order", "expected_order": 2.0}],
    },
}


def builtin_names() -> List[str]:
    return sorted(BUILTIN_SCENARIOS)


def _diagnostics(error: ValidationError) -> List[str]:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return lines


def scenario_from_mapping(data: Dict[str, Any], source: str = "<mapping>") -> Scenario:
    """Validate a parsed config tree, mapping validation errors to ConfigError."""
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid scenario in {source}", _diagnostics(e)) from e


def load_scenario(ref: str) -> Scenario:
    """Load 'builtin:<name>' or a TOML scenario file."""
    if ref.startswith(BUILTIN_PREFIX):
        name = ref[len(BUILTIN_PREFIX) :]
        if name not in BUILTIN_SCENARIOS:
            raise ConfigError(f"unknown builtin scenario {name!r}", [f"available: {', '.join(builtin_names())}"])
        return scenario_from_mapping(BUILTIN_SCENARIOS[name], ref)
    path = Path(ref)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"cannot parse {path}", [str(e)]) from e
    logger.info(f"Loaded scenario file {path}")
    return scenario_from_mapping(data, str(path))
