"""Turn a validated Scenario into the objects experiments operate on."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import sympy as sp

from ..lab.errors import ConfigError, LabError
from ..lab.extension import ExtensionField, SpectralExtension, extend
from ..lab.fieldio import read_field
from ..lab.fields import SpaceTimeField, SpaceTimeGrid
from ..lab.fracheat import FracConfig, PotentialField, manufactured_potential
from ..lab.solutions import SymbolicField, builtin_field
from ..models.scenario import FieldSpec, PotentialSpec, Scenario

logger = logging.getLogger(__name__)


@dataclass
class ScenarioContext:
    """Shared, read-only inputs of every experiment in a run."""

    scenario: Scenario
    cfg: FracConfig
    grid: SpaceTimeGrid
    ext: ExtensionField
    u: Optional[SpaceTimeField] = None
    potential: Optional[PotentialField] = None

    @property
    def spectral(self) -> bool:
        return isinstance(self.ext, SpectralExtension)

    @property
    def kappa(self) -> Optional[float]:
        if self.scenario.field.kappa is not None:
            return self.scenario.field.kappa
        return self.ext.kappa


def boundary_field(spec: FieldSpec, grid: SpaceTimeGrid, seed: int) -> SpaceTimeField:
    """Sampled boundary data of a spectral field spec."""
    if spec.kind == "modes":
        modes = [(mode.k, mode.m, complex(mode.re, mode.im)) for mode in spec.modes]
        return SpaceTimeField.from_modes(grid, modes, real=spec.real)
    return SpaceTimeField.random_band_limited(
        grid, spec.n_modes, spec.max_k, spec.max_m, seed=seed, real=spec.real
    )


def _expression_samples(expression: str, grid: SpaceTimeGrid) -> np.ndarray:
    names = [f"x{i + 1}" for i in range(grid.dim)] + ["t"]
    symbols = sp.symbols(names, real=True)
    try:
        expr = sp.sympify(expression, locals=dict(zip(names, symbols)))
    except (sp.SympifyError, TypeError, SyntaxError) as e:
        raise ConfigError(f"cannot parse potential expression {expression!r}", [str(e)]) from e
    unknown = expr.free_symbols - set(symbols)
    if unknown:
        raise ConfigError(
            f"potential expression uses unknown symbols {sorted(str(u) for u in unknown)}",
            [f"allowed: {', '.join(names)}"],
        )
    xs, t = grid.mesh()
    values = sp.lambdify(symbols, expr, "numpy")(*xs, t)
    return np.broadcast_to(np.asarray(values, dtype=float), grid.shape).copy()


def build_potential(
    spec: PotentialSpec, cfg: FracConfig, grid: SpaceTimeGrid, u: Optional[SpaceTimeField]
) -> Optional[PotentialField]:
    if spec.mode == "none":
        return None
    if spec.mode == "manufactured":
        floor = spec.floor_fraction * u.sup_norm()
        return manufactured_potential(u, cfg, floor=floor)
    if spec.expression:
        return PotentialField(grid, _expression_samples(spec.expression, grid), cfg)
    path = Path(spec.samples_file)
    try:
        field = read_field(path)
    except (OSError, LabError) as e:
        raise ConfigError(f"cannot read potential samples {path}", [str(e)]) from e
    if field.grid != grid:
        raise ConfigError(
            f"potential samples in {path} live on a different grid",
            [f"file grid {field.grid.shape}, scenario grid {grid.shape}"],
        )
    return PotentialField.from_field(field, cfg)


def build_context(scenario: Scenario, seed: Optional[int] = None) -> ScenarioContext:
    """Fields, potential and extension for a scenario; seed overrides scenario.seed."""
    cfg = FracConfig(s=scenario.s)
    grid = scenario.grid
    spec = scenario.field
    seed = scenario.seed if seed is None else seed

    u: Optional[SpaceTimeField] = None
    if spec.spectral:
        u = boundary_field(spec, grid, seed)
    potential = build_potential(scenario.potential, cfg, grid, u)

    if u is not None:
        ext: ExtensionField = extend(u, cfg, scenario.ygrid, potential)
    elif spec.kind == "builtin":
        ext = builtin_field(spec.name, cfg, grid.dim)
        ext.potential = potential
    else:
        ext = SymbolicField(spec.expression, cfg, grid.dim, kappa=spec.kappa, y_smooth=spec.y_smooth)
        ext.potential = potential
    logger.info(f"Scenario {scenario.name}: {ext!r}, potential={potential!r}")
    return ScenarioContext(scenario=scenario, cfg=cfg, grid=grid, ext=ext, u=u, potential=potential)
