"""The fractional heat operator H^s = (d_t - Laplacian)^s on band-limited fields."""

import logging
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import roots_jacobi, roots_laguerre

from .errors import DomainError, PreconditionError, QuadratureDivergenceError, StructuralError
from .fields import SpaceTimeField, SpaceTimeGrid, heat_symbol, warn_if_aliased
from .specfun import gamma, neumann_constant

logger = logging.getLogger(__name__)


class FracConfig(BaseModel):
    """Order s of the operator and the derived weight exponent a = 1 - 2s."""

    model_config = ConfigDict(frozen=True)

    s: float = Field(..., gt=0.0, lt=1.0)

    @property
    def a(self) -> float:
        return 1.0 - 2.0 * self.s

    @property
    def c_s(self) -> float:
        return neumann_constant(self.s)


class BalakrishnanQuadrature(BaseModel):
    """Node counts and splitting point of the subordination integral."""

    model_config = ConfigDict(frozen=True)

    jacobi_nodes: int = Field(default=48, ge=4)
    laguerre_nodes: int = Field(default=96, ge=4)
    split: float = Field(default=1.0, gt=0.0)
    divergence_tol: float = Field(default=1e-8, gt=0.0)


def fractional_power(lam: np.ndarray, s: float) -> np.ndarray:
    """Principal lambda^s with 0^s = 0."""
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros_like(lam)
    nz = lam != 0
    out[nz] = np.exp(s * np.log(lam[nz]))
    return out


def frac_heat_symbol(grid: SpaceTimeGrid, cfg: FracConfig) -> np.ndarray:
    """L(xi, sigma)^{2s} on the spectral grid."""
    return fractional_power(heat_symbol(grid), cfg.s)


def frac_heat_multiplier(field: SpaceTimeField, cfg: FracConfig) -> SpaceTimeField:
    """H^s u by its Fourier multiplier ((2 pi |xi|)^2 + 2 pi i sigma)^s."""
    warn_if_aliased(field, "frac_heat_multiplier")
    return field.with_spectrum(field.spectrum * frac_heat_symbol(field.grid, cfg))


@lru_cache(maxsize=64)
def _jacobi_rule(n: int, s: float) -> Tuple[np.ndarray, np.ndarray]:
    return roots_jacobi(n, 0.0, -s)


@lru_cache(maxsize=16)
def _laguerre_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_laguerre(n)


def _g_regular(w: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """(exp(-w zeta) - 1 + w zeta) / w, with a Taylor branch for small |w zeta|."""
    z = w * zeta
    small = np.abs(z) < 1e-2
    zs = np.where(small, z, 0.0)
    series = np.zeros(z.shape, dtype=complex)
    term = np.ones(z.shape, dtype=complex)
    for k in range(1, 10):
        term = term * (-zs) / k
        if k >= 2:
            series = series + term
    zd = np.where(small, 1.0, z)
    direct = np.exp(-zd) - 1.0 + zd
    return np.where(small, series, direct) / w


def _unit_subordination(theta: np.ndarray, s: float, n_jac: int, n_lag: int, split: float) -> np.ndarray:
    """Q(theta) = int_0^inf w^{-s-1} (exp(-w e^{i theta}) - 1) dw for |theta| <= pi/2."""
    theta = np.asarray(theta, dtype=float)
    zeta = np.exp(1j * theta)

    x, wx = _jacobi_rule(n_jac, s)
    w_nodes = 0.5 * split * (1.0 + x)
    g = _g_regular(w_nodes[None, :], zeta[:, None])
    head = (0.5 * split) ** (1.0 - s) * (g @ wx) - zeta * split ** (1.0 - s) / (1.0 - s)

    v, wv = _laguerre_rule(n_lag)
    rot = np.exp(-1j * theta)
    base = split + v[None, :] * rot[:, None]
    tail_int = np.exp((-s - 1.0) * np.log(base)) @ wv
    tail = rot * np.exp(-split * zeta) * tail_int - split ** (-s) / s
    return head + tail


def subordination_integral(theta: np.ndarray, s: float, quad: BalakrishnanQuadrature) -> np.ndarray:
    """Unit-modulus subordination integral with the node-doubling divergence sentinel."""
    coarse = _unit_subordination(theta, s, quad.jacobi_nodes, quad.laguerre_nodes, quad.split)
    fine = _unit_subordination(
        theta, s, 2 * quad.jacobi_nodes, 2 * quad.laguerre_nodes, quad.split
    )
    gap = np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300)
    worst = float(np.max(gap)) if gap.size else 0.0
    if worst > quad.divergence_tol:
        raise QuadratureDivergenceError(
            f"subordination quadrature changed by {worst:.3e} under node doubling (s={s})",
            estimate=worst,
        )
    return fine


def balakrishnan_scalar(lam: complex, s: float, quad: Optional[BalakrishnanQuadrature] = None) -> complex:
    """-(s / Gamma(1-s)) int_0^inf tau^{-s-1} (exp(-tau lam) - 1) dtau for Re lam >= 0."""
    quad = quad or BalakrishnanQuadrature()
    lam = complex(lam)
    if lam == 0:
        return 0j
    if lam.real < 0:
        raise DomainError(f"subordination needs Re(lambda) >= 0, got {lam}")
    theta = np.angle(lam)
    q = subordination_integral(np.array([theta]), s, quad)[0]
    return complex(-(s / gamma(1.0 - s)) * abs(lam) ** s * q)


def frac_heat_balakrishnan(
    field: SpaceTimeField, cfg: FracConfig, quad: Optional[BalakrishnanQuadrature] = None
) -> SpaceTimeField:
    """H^s u through the subordinated semigroup, mode by mode."""
    quad = quad or BalakrishnanQuadrature()
    warn_if_aliased(field, "frac_heat_balakrishnan")
    spec = field.spectrum
    lam = heat_symbol(field.grid)
    active = (np.abs(spec) > 0) & (lam != 0)
    out = np.zeros_like(spec)
    if np.any(active):
        lam_a = lam[active]
        q = subordination_integral(np.angle(lam_a), cfg.s, quad)
        factor = -(cfg.s / gamma(1.0 - cfg.s)) * np.abs(lam_a) ** cfg.s * q
        out[active] = factor * spec[active]
    return field.with_spectrum(out)


def parabolic_sobolev_norm(field: SpaceTimeField, cfg: FracConfig) -> float:
    """sqrt(sum (1 + |L|^2)^{2s} |u_hat|^2) with the grid's Plancherel weight."""
    weight = (1.0 + np.abs(heat_symbol(field.grid))) ** (2.0 * cfg.s)
    energy = np.sum(weight * np.abs(field.spectrum) ** 2)
    return float(np.sqrt(energy * field.grid.cell_measure / field.grid.size))


def relative_l2(a: SpaceTimeField, b: SpaceTimeField) -> float:
    """||a - b|| / max(||b||, tiny)."""
    denom = b.l2_norm()
    diff = (a - b).l2_norm()
    if denom == 0:
        return diff
    return diff / denom


class PotentialField:
    """Samples of V on the grid, the recorded bound K and an optional gradient bound.

    The nonlocal equation reads H^s u = c_s V u. The extension's weighted Neumann datum
    is then lim y^a U_y = -c_s H^s u = -c_s^2 V u, which is what neumann_coefficient
    returns.
    """

    def __init__(
        self,
        grid: SpaceTimeGrid,
        values: np.ndarray,
        cfg: FracConfig,
        numerator: Optional[SpaceTimeField] = None,
        denominator: Optional[SpaceTimeField] = None,
    ):
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise StructuralError(f"potential shape {values.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise StructuralError("potential samples must be finite")
        self.grid = grid
        self.cfg = cfg
        self.values = values
        self.K = float(np.max(np.abs(values)))
        self._numerator = numerator
        self._denominator = denominator
        self._interpolant = SpaceTimeField(grid, samples=values)

    @classmethod
    def zero(cls, grid: SpaceTimeGrid, cfg: FracConfig) -> "PotentialField":
        return cls(grid, np.zeros(grid.shape), cfg)

    @classmethod
    def from_field(cls, field: SpaceTimeField, cfg: FracConfig) -> "PotentialField":
        values = field.samples.real if field.is_real else field.samples
        return cls(field.grid, values, cfg)

    @property
    def is_zero(self) -> bool:
        return self.K == 0.0

    def sup_gradient(self) -> Dict[str, float]:
        """Sup norms of the spectral derivatives of V."""
        xis, sigma = self.grid.frequency_mesh()
        spec = self._interpolant.spectrum
        report = {}
        for i, xi in enumerate(xis):
            d = self._interpolant.with_spectrum(2j * np.pi * xi * spec).samples
            report[f"dV_dx{i + 1}"] = float(np.max(np.abs(d)))
        d_t = self._interpolant.with_spectrum(2j * np.pi * sigma * spec).samples
        report["dV_dt"] = float(np.max(np.abs(d_t)))
        return report

    def evaluate(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """V at arbitrary points (exact quotient for manufactured potentials)."""
        if self.is_zero:
            return np.zeros(np.atleast_1d(t).shape)
        if self._numerator is not None and self._denominator is not None:
            values = self._numerator.evaluate(x, t) / (self.cfg.c_s * self._denominator.evaluate(x, t))
        else:
            values = self._interpolant.evaluate(x, t)
        if np.isrealobj(self.values):
            return values.real
        return values

    def operator_coefficient(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """c_s V, the coefficient in H^s u = c_s V u."""
        return self.cfg.c_s * self.evaluate(x, t)

    def neumann_coefficient(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """c_s^2 V, so that lim y^a U_y = -(c_s^2 V) u."""
        return self.cfg.c_s**2 * self.evaluate(x, t)

    def rescaled(self, r: float) -> "ScaledPotential":
        return ScaledPotential(self, r)

    def __repr__(self) -> str:
        return f"<PotentialField(K={self.K:.6g}, s={self.cfg.s})>"


class ScaledPotential:
    """Neumann coefficient of an Almgren rescaling: r^{2s} V(r x, r^2 t)."""

    def __init__(self, base: Any, r: float):
        self.base = base
        self.r = float(r)
        self.cfg = base.cfg

    @property
    def is_zero(self) -> bool:
        return bool(self.base.is_zero)

    def neumann_coefficient(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.r ** (2.0 * self.cfg.s) * self.base.neumann_coefficient(self.r * x, self.r**2 * t)

    def rescaled(self, r: float) -> "ScaledPotential":
        return ScaledPotential(self.base, self.r * r)


def manufactured_potential(
    u: SpaceTimeField, cfg: FracConfig, floor: Optional[float] = None
) -> PotentialField:
    """V = H^s u / (c_s u), so that (u, V) solves H^s u = c_s V u exactly on the grid."""
    magnitude = np.abs(u.samples)
    if floor is None:
        floor = 0.1 * float(np.max(magnitude))
    if floor <= 0:
        raise PreconditionError(f"potential floor must be positive, got {floor}")
    if np.min(magnitude) < floor:
        idx = np.unravel_index(int(np.argmin(magnitude)), u.grid.shape)
        xs, t = u.grid.mesh()
        location = {
            "index": tuple(int(i) for i in idx),
            "x": [float(x[idx]) for x in xs],
            "t": float(t[idx]),
            "value": float(magnitude[idx]),
        }
        raise PreconditionError(
            f"|u| = {magnitude[idx]:.3e} below floor {floor:.3e} at x={location['x']}, t={location['t']:.6g}",
            location=location,
        )
    hsu = frac_heat_multiplier(u, cfg)
    values = hsu.samples / (cfg.c_s * u.samples)
    if u.is_real:
        values = values.real
    potential = PotentialField(u.grid, values, cfg, numerator=hsu, denominator=u)
    logger.info(f"Manufactured potential with K={potential.K:.6g} (s={cfg.s}, floor={floor:.3g})")
    return potential
