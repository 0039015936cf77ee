"""Scenario and report models."""

import math
from datetime import datetime
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..lab.extension import YGrid
from ..lab.fields import SpaceTimeGrid
from ..lab.frequency import GaussianQuadrature
from ..lab.solutions import BUILTIN_FIELDS

RADIUS_MARGIN = 0.01


class ModeSpec(BaseModel):
    """One integer mode: amplitude re + i im on exp(2 pi i (<k/Lx, x> + m t/T))."""

    model_config = ConfigDict(extra="forbid")

    k: List[int]
    m: int = 0
    re: float = 0.0
    im: float = 0.0


class FieldSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["builtin", "modes", "random", "expression"]
    name: Optional[str] = None
    modes: List[ModeSpec] = Field(default_factory=list)
    real: bool = True
    n_modes: int = Field(default=5, ge=1)
    max_k: int = Field(default=2, ge=0)
    max_m: int = Field(default=1, ge=0)
    expression: Optional[str] = None
    kappa: Optional[float] = None
    y_smooth: bool = False

    @model_validator(mode="after")
    def _complete(self) -> "FieldSpec":
        if self.kind == "builtin":
            if self.name not in BUILTIN_FIELDS:
                raise ValueError(f"unknown builtin field {self.name!r}; choose from {sorted(BUILTIN_FIELDS)}")
        elif self.kind == "modes" and not self.modes:
            raise ValueError("field kind 'modes' needs a non-empty modes list")
        elif self.kind == "expression" and not self.expression:
            raise ValueError("field kind 'expression' needs an expression")
        return self

    @property
    def spectral(self) -> bool:
        return self.kind in ("modes", "random")


class PotentialSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["none", "manufactured", "explicit"] = "none"
    floor_fraction: float = Field(default=0.1, gt=0.0, le=1.0)
    expression: Optional[str] = None
    samples_file: Optional[str] = None

    @model_validator(mode="after")
    def _source(self) -> "PotentialSpec":
        if self.mode == "explicit" and not (self.expression or self.samples_file):
            raise ValueError("explicit potential needs an expression or a samples_file")
        return self


class ExperimentBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: Optional[str] = None


class OpCheckExperiment(ExperimentBase):
    kind: Literal["op-check"] = "op-check"
    orders: List[float] = Field(default_factory=list)
    tolerance: float = Field(default=1e-6, gt=0.0)

    @field_validator("orders")
    @classmethod
    def _orders(cls, value: List[float]) -> List[float]:
        if any(not 0.0 < s < 1.0 for s in value):
            raise ValueError("orders must lie in (0, 1)")
        return value


class ExtendCheckExperiment(ExperimentBase):
    kind: Literal["extend-check"] = "extend-check"
    tolerance: float = Field(default=1e-6, gt=0.0)
    eval_points: List[List[float]] = Field(default_factory=list)
    residual_h_length: float = Field(default=4e-2, gt=0.0)


class FrequencyExperiment(ExperimentBase):
    kind: Literal["frequency"] = "frequency"
    radii_length: List[float] = Field(default_factory=lambda: [0.05 + 0.05 * j for j in range(10)])
    C: float = Field(default=0.0, ge=0.0)
    calibrate: bool = False
    tolerance: float = Field(default=1e-6, gt=0.0)
    dr_length: Optional[float] = Field(default=None, gt=0.0)
    center_time: Optional[float] = Field(default=None, lt=0.0)

    @field_validator("radii_length")
    @classmethod
    def _increasing(cls, value: List[float]) -> List[float]:
        if not value or any(r <= 0 for r in value) or any(b <= a for a, b in zip(value[:-1], value[1:])):
            raise ValueError("radii_length must be positive and strictly increasing")
        return value


class BlowupExperiment(ExperimentBase):
    kind: Literal["blowup"] = "blowup"
    radii_length: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05, 0.025])
    tolerance: float = Field(default=1e-3, gt=0.0)
    expected_kappa: Optional[float] = None
    fit_count: int = Field(default=5, ge=2)

    @field_validator("radii_length")
    @classmethod
    def _decreasing(cls, value: List[float]) -> List[float]:
        if len(value) < 2 or any(r <= 0 for r in value) or any(b >= a for a, b in zip(value[:-1], value[1:])):
            raise ValueError("radii_length must be positive and strictly decreasing")
        return value


class HarnackExperiment(ExperimentBase):
    kind: Literal["harnack"] = "harnack"
    radii_length: List[float] = Field(default_factory=lambda: [0.1, 0.2, 0.4])
    psi_value: float = 0.0
    points: int = Field(default=9, ge=2)


class VanishingOrderExperiment(ExperimentBase):
    kind: Literal["vanishing-order"] = "vanishing-order"
    radii_length: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.2, 0.4])
    center_length: List[float] = Field(default_factory=list)
    center_time: float = Field(default=0.0, le=0.0)
    points: int = Field(default=9, ge=2)
    expected_order: Optional[float] = None
    expected_infinite: bool = False
    tolerance: float = Field(default=0.05, gt=0.0)


class CalibrateExperiment(ExperimentBase):
    kind: Literal["calibrate-C"] = "calibrate-C"
    radii_length: List[float] = Field(default_factory=lambda: [0.05 + 0.05 * j for j in range(10)])
    C_max: float = Field(default=1e3, gt=0.0)


Experiment = Annotated[
    Union[
        OpCheckExperiment,
        ExtendCheckExperiment,
        FrequencyExperiment,
        BlowupExperiment,
        HarnackExperiment,
        VanishingOrderExperiment,
        CalibrateExperiment,
    ],
    Field(discriminator="kind"),
]

EXPERIMENT_KINDS = {
    "op-check": OpCheckExperiment,
    "extend-check": ExtendCheckExperiment,
    "frequency": FrequencyExperiment,
    "blowup": BlowupExperiment,
    "harnack": HarnackExperiment,
    "vanishing-order": VanishingOrderExperiment,
    "calibrate-C": CalibrateExperiment,
}


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    s: float = Field(..., gt=0.0, lt=1.0)
    seed: int = 0
    grid: SpaceTimeGrid = Field(default_factory=SpaceTimeGrid)
    ygrid: YGrid = Field(default_factory=YGrid)
    quadrature: GaussianQuadrature = Field(default_factory=GaussianQuadrature)
    field: FieldSpec
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    experiments: List[Experiment] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _consistent(self) -> "Scenario":
        if self.field.kind == "builtin" and self.field.name == "x1x2" and self.grid.dim != 2:
            raise ValueError("builtin x1x2 needs grid.dim = 2")
        if self.field.kind == "modes":
            for mode in self.field.modes:
                if len(mode.k) != self.grid.dim:
                    raise ValueError(f"mode k={mode.k} does not match grid.dim={self.grid.dim}")
        if self.potential.mode == "manufactured" and not self.field.spectral:
            raise ValueError("a manufactured potential needs a spectral field (modes or random)")
        limit = math.sqrt(self.grid.t_window_time) * (1.0 - RADIUS_MARGIN)
        for index, exp in enumerate(self.experiments):
            radii = getattr(exp, "radii_length", [])
            if radii and max(radii) > limit:
                raise ValueError(
                    f"experiments[{index}].radii_length: radius {max(radii)} exceeds sqrt(T)(1 - margin) = {limit:.6g}"
                )
            center = getattr(exp, "center_length", None)
            if center and len(center) != self.grid.dim:
                raise ValueError(f"experiments[{index}].center_length needs {self.grid.dim} coordinates")
        return self

    def experiment_ids(self) -> List[str]:
        return [f"{index:02d}-{exp.label or exp.kind}" for index, exp in enumerate(self.experiments)]


class ExperimentResult(BaseModel):
    experiment_id: str
    kind: str
    status: Literal["pass", "fail", "report-only"]
    metrics: Dict[str, Any] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    wall_clock: float = Field(default=0.0, exclude=True)
    error: Optional[str] = None


class RunReport(BaseModel):
    scenario: str
    tool_version: str
    started_at: Optional[datetime] = Field(default=None, exclude=True)
    wall_clock: float = Field(default=0.0, exclude=True)
    threads: int = Field(default=1, exclude=True)
    config: Dict[str, Any]
    experiments: List[ExperimentResult]

    @property
    def failed(self) -> List[ExperimentResult]:
        return [result for result in self.experiments if result.status == "fail"]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def echoed_scenario(self) -> Scenario:
        return Scenario.model_validate(self.config)

    def timing(self) -> Dict[str, Any]:
        """Run-dependent fields kept out of report.json."""
        return {
            "started_at": None if self.started_at is None else self.started_at.isoformat(),
            "wall_clock": self.wall_clock,
            "threads": self.threads,
            "experiments": {result.experiment_id: result.wall_clock for result in self.experiments},
        }
