"""The degenerate extension problem y^a U_t = div(y^a grad U) on the upper half-space.

A band-limited boundary datum u extends mode by mode:

    U_hat(xi, y, sigma) = Phi_s(L y) / Phi_s(0) * u_hat(xi, sigma),

and the weighted flux y^a U_y of one mode is -L^{2s} Phi_{1-s}(L y) / Phi_s(0) * u_hat,
which stays finite at y = 0.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError, ExtrapolationError, StructuralError
from .fields import ModeSet, SpaceTimeField, warn_if_aliased
from .fracheat import FracConfig, fractional_power
from .quadrature import exp_sinh_ray
from .specfun import gamma, phi, principal_L_grid

logger = logging.getLogger(__name__)


class YGrid(BaseModel):
    """Geometric nodes y_1 < ... < y_M in (0, Ymax]."""

    model_config = ConfigDict(frozen=True)

    y_min: float = Field(default=1e-4, gt=0.0, le=1e-3)
    y_max: float = Field(default=12.0, ge=8.0)
    points: int = Field(default=64, ge=8)
    stencil: int = Field(default=6, ge=4)

    @model_validator(mode="after")
    def _ordered(self) -> "YGrid":
        if self.stencil > self.points:
            raise ValueError("extrapolation stencil larger than the grid")
        return self

    @property
    def ratio(self) -> float:
        return (self.y_max / self.y_min) ** (1.0 / (self.points - 1))

    def nodes(self) -> np.ndarray:
        return self.y_min * self.ratio ** np.arange(self.points)


@dataclass
class FieldSample:
    """Value and first derivatives of an extension field at a set of points."""

    value: np.ndarray
    grad_x: Optional[np.ndarray] = None  # (..., n)
    d_y: Optional[np.ndarray] = None
    d_t: Optional[np.ndarray] = None

    def z_value(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Z U = <X, grad U> + 2 t U_t with X = (x, y)."""
        if self.grad_x is None or self.d_y is None or self.d_t is None:
            raise StructuralError("Z needs first derivatives")
        return np.sum(x * self.grad_x, axis=-1) + y * self.d_y + 2.0 * t * self.d_t

    def grad_sq(self) -> np.ndarray:
        if self.grad_x is None or self.d_y is None:
            raise StructuralError("gradient not evaluated")
        return np.sum(np.abs(self.grad_x) ** 2, axis=-1) + np.abs(self.d_y) ** 2


class ExtensionField(ABC):
    """Evaluator for U(x, y, t) and its first derivatives on y >= 0.

    y_smooth marks fields that are polynomials in y^2 (or independent of y), for
    which Gauss rules in y are exact; fields with fractional powers of y set it False.
    """

    dim: int
    cfg: FracConfig
    y_smooth: bool = True
    kappa: Optional[float] = None
    potential: Optional[Any] = None
    certificate: str = ""
    carries_flux: bool = False

    @abstractmethod
    def evaluate(
        self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True
    ) -> FieldSample:
        """Evaluate at P points: x (P, n), y (P,), t (P,)."""

    def evaluate_slice(self, x: np.ndarray, y: np.ndarray, t: float, derivatives: bool = True) -> FieldSample:
        """Tensor evaluation on x nodes (Px, n) times y nodes (Py,) at one time t."""
        px, py = x.shape[0], y.size
        xx = np.repeat(x, py, axis=0)
        yy = np.tile(y, px)
        tt = np.full(px * py, float(t))
        sample = self.evaluate(xx, yy, tt, derivatives=derivatives)
        return FieldSample(
            value=sample.value.reshape(px, py),
            grad_x=None if sample.grad_x is None else sample.grad_x.reshape(px, py, self.dim),
            d_y=None if sample.d_y is None else sample.d_y.reshape(px, py),
            d_t=None if sample.d_t is None else sample.d_t.reshape(px, py),
        )

    def trace(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Boundary values u(x, t) = U(x, 0, t)."""
        x = np.atleast_2d(x)
        return self.evaluate(x, np.zeros(x.shape[0]), np.atleast_1d(t), derivatives=False).value

    def bounds(self) -> Optional[Dict[str, float]]:
        """Sampling window (x half-length, time window) or None when unbounded."""
        return None

    def boundary_flux(self, x: np.ndarray, t: np.ndarray) -> Optional[np.ndarray]:
        """lim_{y -> 0} y^a U_y at P boundary points for fields that carry their own Neumann data."""
        return None

    def z_apply(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Z U = <X, grad U> + 2 t U_t at P points."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.evaluate(x, y, t).z_value(x, y, t)

    def euler_residual(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, kappa: float) -> np.ndarray:
        """Z U - kappa U; vanishes for parabolically homogeneous U of degree kappa."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        sample = self.evaluate(x, y, t)
        return sample.z_value(x, y, t) - kappa * sample.value


def _mode_error(exc: DomainError, index: int, modes: ModeSet) -> DomainError:
    return DomainError(
        f"mode {index} (xi={modes.xi[index].tolist()}, sigma={modes.sigma[index]:.6g}): {exc}"
    )


class SpectralExtension(ExtensionField):
    """Extension of a band-limited SpaceTimeField through the Macdonald formula."""

    def __init__(
        self,
        u: SpaceTimeField,
        cfg: FracConfig,
        ygrid: Optional[YGrid] = None,
        potential: Optional[Any] = None,
    ):
        self.u = u
        self.cfg = cfg
        self.ygrid = ygrid or YGrid()
        self.dim = u.grid.dim
        self.y_smooth = False
        self.potential = potential
        self.kappa = None
        self.certificate = "Macdonald extension of band-limited boundary data"
        self.carries_flux = True
        self.modes = u.active_modes()
        self.L = principal_L_grid(self.modes.xi_norm, self.modes.sigma)
        self.L2s = fractional_power(self.L**2, cfg.s)
        self.phi0 = 2.0 ** (cfg.s - 1.0) * gamma(cfg.s)
        self.real = u.is_real

    def __repr__(self) -> str:
        return f"<SpectralExtension(modes={self.modes.count}, s={self.cfg.s})>"

    def bounds(self) -> Optional[Dict[str, float]]:
        return {
            "x_half": 0.5 * self.u.grid.x_period_length,
            "t_window": self.u.grid.t_window_time,
        }

    def _phi_table(self, nu: float, y: np.ndarray) -> np.ndarray:
        z = np.outer(y, self.L)
        out = np.empty(z.shape, dtype=complex)
        for j in range(self.modes.count):
            try:
                out[:, j] = phi(nu, z[:, j])
            except DomainError as e:
                raise _mode_error(e, j, self.modes) from e
        return out

    def y_factor(self, y: np.ndarray) -> np.ndarray:
        """Phi_s(L y) / Phi_s(0) for y nodes (Py,) and every mode: (Py, M)."""
        return self._phi_table(self.cfg.s, np.asarray(y, dtype=float)) / self.phi0

    def flux_factor(self, y: np.ndarray) -> np.ndarray:
        """Per-mode weighted flux y^a d_y of the y factor: (Py, M)."""
        table = self._phi_table(1.0 - self.cfg.s, np.asarray(y, dtype=float))
        return -self.L2s[None, :] * table / self.phi0

    def _finish(self, values: np.ndarray) -> np.ndarray:
        return values.real if self.real else values

    def evaluate(
        self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True
    ) -> FieldSample:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(y < 0):
            raise DomainError("extension evaluated below y = 0")
        if self.modes.count == 0:
            zero = np.zeros(x.shape[0])
            return FieldSample(zero, np.zeros(x.shape), zero.copy(), zero.copy())
        yfac = self.y_factor(y)
        value = self._finish(self.modes.synthesize(x, t, yfac))
        if not derivatives:
            return FieldSample(value)
        grad = np.stack(
            [
                self._finish(self.modes.synthesize(x, t, yfac * (2j * np.pi * self.modes.xi[:, d])))
                for d in range(self.dim)
            ],
            axis=-1,
        )
        d_t = self._finish(self.modes.synthesize(x, t, yfac * (2j * np.pi * self.modes.sigma)))
        positive = y > 0
        d_y = np.zeros(y.shape, dtype=float if self.real else complex)
        if np.any(positive):
            yp = y[positive]
            flux = self.flux_factor(yp) / (yp ** self.cfg.a)[:, None]
            d_y[positive] = self._finish(self.modes.synthesize(x[positive], t[positive], flux))
        return FieldSample(value, grad, d_y, d_t)

    def evaluate_slice(self, x: np.ndarray, y: np.ndarray, t: float, derivatives: bool = True) -> FieldSample:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        px, py = x.shape[0], y.size
        if self.modes.count == 0:
            zero = np.zeros((px, py))
            return FieldSample(zero, np.zeros((px, py, self.dim)), zero.copy(), zero.copy())
        phase = np.exp(2j * np.pi * (x @ self.modes.xi.T)) * (
            self.modes.coeff * np.exp(2j * np.pi * self.modes.sigma * t)
        )
        yfac = self.y_factor(y)
        value = self._finish(phase @ yfac.T)
        if not derivatives:
            return FieldSample(value)
        grad = np.stack(
            [self._finish((phase * (2j * np.pi * self.modes.xi[:, d])) @ yfac.T) for d in range(self.dim)],
            axis=-1,
        )
        d_t = self._finish((phase * (2j * np.pi * self.modes.sigma)) @ yfac.T)
        if np.any(y <= 0):
            raise DomainError("slice derivatives need y > 0")
        flux = self.flux_factor(y) / (y ** self.cfg.a)[:, None]
        d_y = self._finish(phase @ flux.T)
        return FieldSample(value, grad, d_y, d_t)

    def weighted_flux(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """y^a U_y at P points, finite down to y = 0."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self._finish(self.modes.synthesize(x, t, self.flux_factor(y)))

    def boundary_flux(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Neumann datum -c_s H^s u sampled at P boundary points."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self.weighted_flux(x, np.zeros(x.shape[0]), t)

    @cached_property
    def tensors(self) -> Dict[str, np.ndarray]:
        """U, dU/dx_i, dU/dy, dU/dt on (x grid, YGrid, t grid), shape (Nx,)*n + (M, Nt)."""
        grid = self.u.grid
        ys = self.ygrid.nodes()
        spec = self.u.spectrum
        xis, sigma = grid.frequency_mesh()
        xi_norm = grid.xi_norm_mesh()
        active = np.abs(spec) > 0
        L = principal_L_grid(xi_norm[active], sigma[active])
        L2s = fractional_power(L**2, self.cfg.s)
        out: Dict[str, List[np.ndarray]] = {"U": [], "dU_dy": [], "dU_dt": []}
        for d in range(grid.dim):
            out[f"dU_dx{d + 1}"] = []
        for y in ys:
            fac = np.zeros(grid.shape, dtype=complex)
            fac[active] = phi(self.cfg.s, L * y) / self.phi0
            dfac = np.zeros(grid.shape, dtype=complex)
            dfac[active] = -L2s * phi(1.0 - self.cfg.s, L * y) / (self.phi0 * y**self.cfg.a)
            base = self.u.with_spectrum(spec * fac)
            out["U"].append(base.samples)
            out["dU_dy"].append(self.u.with_spectrum(spec * dfac).samples)
            out["dU_dt"].append(base.with_spectrum(base.spectrum * 2j * np.pi * sigma).samples)
            for d in range(grid.dim):
                out[f"dU_dx{d + 1}"].append(base.with_spectrum(base.spectrum * 2j * np.pi * xis[d]).samples)
        return {k: self._finish(np.stack(v, axis=grid.dim)) for k, v in out.items()}


def extend(
    u: SpaceTimeField,
    cfg: FracConfig,
    ygrid: Optional[YGrid] = None,
    potential: Optional[Any] = None,
) -> SpectralExtension:
    """Solve the extension problem for band-limited boundary data u."""
    warn_if_aliased(u, "extend")
    ext = SpectralExtension(u, cfg, ygrid, potential)
    # force the per-mode tables once so domain errors surface here with the mode index
    ext.y_factor(ext.ygrid.nodes()[:1])
    logger.info(f"Extended field with {ext.modes.count} active modes (s={cfg.s})")
    return ext


def boundary_convergence(ext: SpectralExtension, count: int = 6) -> Dict[str, Any]:
    """sup |U(., y_k, .) - u| on the smallest YGrid nodes and its fitted power of y."""
    ys = ext.ygrid.nodes()[:count]
    diffs = np.abs(ext.y_factor(ys) - 1.0) @ np.abs(ext.modes.coeff)
    mask = diffs > 1e-300
    exponent = float("nan")
    if np.count_nonzero(mask) >= 2:
        exponent = float(np.polyfit(np.log(ys[mask]), np.log(diffs[mask]), 1)[0])
    return {"y": ys, "error": diffs, "exponent": exponent, "expected": 2.0 * ext.cfg.s}


@dataclass
class NeumannTrace:
    """Spectral limit of y^a U_y, its grid extrapolation and their discrepancy."""

    limit: SpaceTimeField
    grid_limit: SpaceTimeField
    discrepancy: float
    operator: SpaceTimeField
    mode_ratios: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _extrapolate_zero(ys: np.ndarray, values: np.ndarray, s: float) -> Tuple[np.ndarray, np.ndarray]:
    """Least-squares y -> 0 limits with exponents {0, 2-2s, 2, 4-2s} on nested stencils.

    Returns the estimates from the 4-, 5- and 6-node stencils, shape (3, M).
    """
    scale = ys / ys[0]
    exponents = np.array([0.0, 2.0 - 2.0 * s, 2.0, 4.0 - 2.0 * s])
    estimates = []
    for count in range(4, ys.size + 1):
        basis = scale[:count, None] ** exponents[None, :]
        coeffs, *_ = np.linalg.lstsq(basis, values[:count], rcond=None)
        estimates.append(coeffs[0])
    return np.array(estimates), exponents


def neumann_trace(ext: SpectralExtension) -> NeumannTrace:
    """lim_{y -> 0} y^a U_y in closed form and by extrapolation from the YGrid."""
    grid = ext.u.grid
    spec = ext.u.spectrum
    active = np.abs(spec) > 0
    xis, sigma = grid.frequency_mesh()
    L = principal_L_grid(grid.xi_norm_mesh()[active], sigma[active])
    L2s = fractional_power(L**2, ext.cfg.s)
    phi_edge = 2.0 ** (-ext.cfg.s) * gamma(1.0 - ext.cfg.s)

    exact = np.zeros(grid.shape, dtype=complex)
    exact[active] = -L2s * phi_edge / ext.phi0

    ys = ext.ygrid.nodes()[: ext.ygrid.stencil]
    table = np.stack([-L2s * phi(1.0 - ext.cfg.s, L * y) / ext.phi0 for y in ys])
    estimates, _ = _extrapolate_zero(ys, table, ext.cfg.s)
    steps = np.abs(np.diff(estimates, axis=0))
    magnitude = np.maximum(np.abs(estimates[-1]), 1e-300)
    noise = 1e-8 * magnitude
    growing = (steps[-1] > steps[-2]) & (steps[-1] > noise)
    if np.any(growing):
        bad = int(np.argmax(growing))
        raise ExtrapolationError(
            f"non-monotone Richardson tail for mode {bad}: steps {steps[:, bad].tolist()}"
        )
    approx = np.zeros(grid.shape, dtype=complex)
    approx[active] = estimates[-1]

    limit = ext.u.with_spectrum(spec * exact)
    grid_limit = ext.u.with_spectrum(spec * approx)
    nonzero = np.abs(exact[active]) > 0
    ratios = np.ones(0)
    if np.any(nonzero):
        ratios = -(approx[active][nonzero] / ext.cfg.c_s) / L2s[nonzero]
    exact_norm = np.linalg.norm(exact[active])
    discrepancy = 0.0
    if exact_norm > 0:
        discrepancy = float(np.linalg.norm(approx[active] - exact[active]) / exact_norm)
    operator = limit.scaled(-1.0 / ext.cfg.c_s)
    logger.info(f"Neumann trace: grid/spectral discrepancy {discrepancy:.3e}")
    return NeumannTrace(limit, grid_limit, discrepancy, operator, ratios)


class Box(BaseModel):
    """Axis-aligned region in (x, y, t) with a sampling resolution."""

    model_config = ConfigDict(frozen=True)

    x_lo: List[float]
    x_hi: List[float]
    y_lo: float = Field(..., gt=0.0)
    y_hi: float
    t_lo: float
    t_hi: float
    points: int = Field(default=4, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "Box":
        if len(self.x_lo) != len(self.x_hi):
            raise ValueError("x_lo and x_hi must have the same length")
        if any(lo > hi for lo, hi in zip(self.x_lo, self.x_hi)) or self.y_lo > self.y_hi or self.t_lo > self.t_hi:
            raise ValueError("box bounds must be ordered")
        return self

    def sample_points(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        axes = [np.linspace(lo, hi, self.points) for lo, hi in zip(self.x_lo, self.x_hi)]
        axes.append(np.linspace(self.y_lo, self.y_hi, self.points))
        axes.append(np.linspace(self.t_lo, self.t_hi, self.points))
        grids = np.meshgrid(*axes, indexing="ij")
        x = np.stack([g.ravel() for g in grids[:-2]], axis=1)
        return x, grids[-2].ravel(), grids[-1].ravel()


def _check_region(ext: ExtensionField, box: Box, h: float) -> None:
    if len(box.x_lo) != ext.dim:
        raise StructuralError(f"box has {len(box.x_lo)} space axes, field has {ext.dim}")
    if box.y_lo - h <= 0:
        raise StructuralError(f"box reaches y <= mesh width ({box.y_lo} - {h})")
    if isinstance(ext, SpectralExtension) and box.y_lo < ext.ygrid.nodes()[1]:
        raise StructuralError(f"box starts below the second y node {ext.ygrid.nodes()[1]:.3g}")
    window = ext.bounds()
    if window is None:
        return
    reach = np.max(np.abs(np.concatenate([box.x_lo, box.x_hi]))) + h
    if reach > window["x_half"] or box.t_lo - h < -window["t_window"] or box.t_hi + h > 0.0:
        raise StructuralError("box (plus stencil) leaves the sampling window")


def pde_residual(ext: ExtensionField, box: Box, h: float = 1e-2) -> float:
    """Max of |y^a U_t - div(y^a grad U)| over the box with centered differences of width h."""
    _check_region(ext, box, h)
    x, y, t = box.sample_points()
    a = ext.cfg.a

    def val(dx: np.ndarray, dy: float, dt: float) -> np.ndarray:
        return ext.evaluate(x + dx, y + dy, t + dt, derivatives=False).value

    centre = val(np.zeros(ext.dim), 0.0, 0.0)
    laplace = np.zeros_like(centre)
    for d in range(ext.dim):
        e = np.zeros(ext.dim)
        e[d] = h
        laplace = laplace + (val(e, 0.0, 0.0) - 2.0 * centre + val(-e, 0.0, 0.0)) / h**2
    zero = np.zeros(ext.dim)
    up, down = val(zero, h, 0.0), val(zero, -h, 0.0)
    flux_y = ((y + 0.5 * h) ** a * (up - centre) - (y - 0.5 * h) ** a * (centre - down)) / h**2
    u_t = (val(zero, 0.0, h) - val(zero, 0.0, -h)) / (2.0 * h)
    residual = y**a * u_t - (y**a * laplace + flux_y)
    return float(np.max(np.abs(residual)))


def residual_convergence(
    ext: ExtensionField, box: Box, h0: float = 4e-2, levels: int = 3, floor: float = 1e-9
) -> Dict[str, Any]:
    """pde_residual on h0, h0/2, ... and the observed orders; 'exact' when every residual is below floor."""
    hs = [h0 / 2**k for k in range(levels)]
    residuals = [pde_residual(ext, box, h) for h in hs]
    orders = []
    for r1, r2 in zip(residuals[:-1], residuals[1:]):
        orders.append(math.log2(r1 / r2) if r1 > floor and r2 > 0 else float("nan"))
    exact = all(r <= floor for r in residuals)
    return {"h": hs, "residual": residuals, "order": orders, "exact": exact}


def poisson_kernel(cfg: FracConfig, z: np.ndarray, y: float, tau: np.ndarray) -> np.ndarray:
    """P^s_y(z, tau) = y^{2s} exp(-(|z|^2 + y^2)/4 tau) / (4^{n/2+s} pi^{n/2} Gamma(s) tau^{n/2+1+s})."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    tau = np.asarray(tau, dtype=float)
    n = z.shape[1]
    s = cfg.s
    norm = 4.0 ** (0.5 * n + s) * math.pi ** (0.5 * n) * gamma(s)
    r2 = np.sum(z**2, axis=1)
    return y ** (2 * s) * np.exp(-(r2 + y**2) / (4.0 * tau)) / (norm * tau ** (0.5 * n + 1.0 + s))


def poisson_kernel_mass(cfg: FracConfig, y: float, dim: int = 1) -> float:
    """Total mass of P^s_y: space Gaussian in closed form, tau integral by exp-sinh quadrature in 1/tau."""
    rho, w = exp_sinh_ray()
    tau = y**2 / (4.0 * rho)
    kernel = poisson_kernel(cfg, np.zeros((1, dim)), y, tau)
    space_mass = (4.0 * math.pi * tau) ** (0.5 * dim)
    return float(np.sum(w * kernel * space_mass * tau**2 * (4.0 / y**2)))


def _ray_integral(lam: complex, y: float, power: float) -> complex:
    """int_0^inf tau^{power} exp(-y^2/(4 tau) - tau lam) dtau along tau = rho e^{-i theta/2}."""
    theta = math.atan2(lam.imag, lam.real)
    phase = np.exp(-0.5j * theta)
    scale = y / (2.0 * math.sqrt(abs(lam)))
    rho, w = exp_sinh_ray()
    tau = scale * rho * phase
    integrand = np.exp(power * np.log(tau) - y**2 / (4.0 * tau) - tau * lam)
    return complex(np.sum(w * integrand) * scale * phase)


@dataclass
class PoissonReport:
    max_relative_deviation: float
    integral_values: np.ndarray
    extension_values: np.ndarray
    representation: str


def poisson_check(
    u: SpaceTimeField,
    cfg: FracConfig,
    points: Sequence[Sequence[float]],
    representation: str = "poisson",
    ext: Optional[SpectralExtension] = None,
) -> PoissonReport:
    """Compare extend with an integral representation of U at evaluation points (x..., y, t).

    representation="poisson": U = y^{2s}/(2^{2s} Gamma(s)) int tau^{-1-s} e^{-y^2/4tau} e^{-tau H} u dtau.
    representation="operator": U = Gamma(s)^{-1} int tau^{s-1} e^{-y^2/4tau} e^{-tau H}(H^s u) dtau,
    with the constant mode carried over unchanged.
    """
    if representation not in ("poisson", "operator"):
        raise DomainError(f"unknown representation {representation!r}")
    ext = ext or SpectralExtension(u, cfg)
    modes = u.active_modes()
    s = cfg.s
    n = u.grid.dim
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != n + 2:
        raise StructuralError(f"points need {n + 2} coordinates (x..., y, t)")
    lam = (2.0 * np.pi * modes.xi_norm) ** 2 + 2j * np.pi * modes.sigma

    integral = np.zeros(pts.shape[0], dtype=complex)
    for p, point in enumerate(pts):
        x, y, t = point[:n], float(point[n]), float(point[n + 1])
        if not 0.1 <= y <= 2.0:
            raise DomainError(f"point y={y} outside [0.1, 2]")
        weights = np.empty(modes.count, dtype=complex)
        for j, lam_j in enumerate(lam):
            if lam_j == 0:
                weights[j] = 1.0
            elif representation == "poisson":
                weights[j] = y ** (2 * s) / (2.0 ** (2 * s) * gamma(s)) * _ray_integral(lam_j, y, -1.0 - s)
            else:
                lam_s = complex(np.exp(s * np.log(lam_j)))
                weights[j] = lam_s * _ray_integral(lam_j, y, s - 1.0) / gamma(s)
        integral[p] = modes.synthesize(x[None, :], np.array([t]), weights)[0]

    ext_values = ext.evaluate(pts[:, :n], pts[:, n], pts[:, n + 1], derivatives=False).value
    if u.is_real:
        integral = integral.real
    floor = 1e-12 * max(u.sup_norm(), 1e-300)
    deviation = np.abs(integral - ext_values) / np.maximum(np.abs(ext_values), floor)
    return PoissonReport(float(np.max(deviation)), integral, np.asarray(ext_values), representation)


def neumann_decay_bound(ext: SpectralExtension, ys: Optional[np.ndarray] = None) -> Dict[str, float]:
    """sup over the grid and y in (0, 1] of |U_y| y^{1-2s}, with its ratio to K ||u||."""
    if ys is None:
        nodes = ext.ygrid.nodes()
        ys = nodes[nodes <= 1.0]
    grid = ext.u.grid
    xs, t = grid.mesh()
    x = np.stack([g.ravel() for g in xs], axis=1)
    tt = t.ravel()
    bound = 0.0
    for y in ys:
        flux = ext.weighted_flux(x, np.full(tt.size, y), tt)
        bound = max(bound, float(np.max(np.abs(flux))))
    report = {"bound": bound, "ratio": float("nan")}
    potential = ext.potential
    if potential is not None and getattr(potential, "K", 0.0) > 0:
        report["ratio"] = bound / (potential.K * ext.u.sup_norm())
    return report
