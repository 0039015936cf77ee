"""Almgren rescalings, blow-up sequences, vanishing order and the growth checks built on them."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import DegeneracyError, DomainError, PreconditionError, StructuralError
from .extension import ExtensionField, FieldSample
from .fields import SpaceTimeField
from .fracheat import FracConfig, frac_heat_multiplier, relative_l2
from .frequency import (
    H_FLOOR,
    FrequencyCurve,
    GaussianQuadrature,
    averaged_functionals,
    height_average,
)
from .solutions import LinearCombination

logger = logging.getLogger(__name__)

SUP_FLOOR = 1e-14
SLOPE_CAP = 40.0
KAPPA_FIT_COUNT = 5


@dataclass(frozen=True)
class ParabolicDilation:
    """delta_lambda(X, t) = (lambda X, lambda^2 t)."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError(f"dilation factor must be positive, got {self.lam}")

    def apply(self, X: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.lam * np.asarray(X, dtype=float), self.lam**2 * np.asarray(t, dtype=float)

    def compose(self, other: "ParabolicDilation") -> "ParabolicDilation":
        return ParabolicDilation(self.lam * other.lam)

    def inverse(self) -> "ParabolicDilation":
        return ParabolicDilation(1.0 / self.lam)


@dataclass(frozen=True)
class ParabolicCylinder:
    """Q_r(x0, t0) = B_r(x0) x (t0 - r^2, t0]; sampled on its closure."""

    x0: Tuple[float, ...]
    t0: float
    r: float

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise StructuralError(f"cylinder radius must be positive, got {self.r}")

    @property
    def dim(self) -> int:
        return len(self.x0)

    def contains(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        inside = np.linalg.norm(x - np.asarray(self.x0), axis=1) <= self.r * (1 + 1e-12)
        t = np.asarray(t)
        return inside & (t >= self.t0 - self.r**2) & (t <= self.t0)

    def sample(
        self, points: int, half_ball: bool = False, t_range: Optional[Tuple[float, float]] = None
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Tensor samples, endpoints included: x (P, n), y (P,), t (P,).

        With half_ball the space part is {(x, y): |(x - x0, y)| <= r, y >= 0}, otherwise y = 0.
        t_range gives the time interval as fractions (lo, hi) of r^2 below t0.
        """
        if points < 2:
            raise StructuralError("cylinder sampling needs at least 2 points per axis")
        lo, hi = t_range if t_range is not None else (1.0, 0.0)
        axes = [np.linspace(c - self.r, c + self.r, points) for c in self.x0]
        if half_ball:
            axes.append(np.linspace(0.0, self.r, points))
        grids = np.meshgrid(*axes, indexing="ij")
        X = np.stack([g.ravel() for g in grids], axis=1)
        offset = np.concatenate([np.asarray(self.x0), [0.0] if half_ball else []])
        keep = np.linalg.norm(X - offset, axis=1) <= self.r * (1 + 1e-12)
        X = X[keep]
        times = np.linspace(self.t0 - lo * self.r**2, self.t0 - hi * self.r**2, points)
        if X.shape[0] == 0:
            raise StructuralError(f"empty cylinder sampling at r={self.r}")
        x = np.repeat(X[:, : self.dim], times.size, axis=0)
        y = np.repeat(X[:, self.dim], times.size) if half_ball else np.zeros(x.shape[0])
        t = np.tile(times, X.shape[0])
        return x, y, t


class RescaledField(ExtensionField):
    """U_r(X, t) = r^{a/2} U(r X, r^2 t) / sqrt(H(U, r))."""

    def __init__(self, base: ExtensionField, r: float, height: float):
        if not height > H_FLOOR:
            raise DegeneracyError(f"H(U, {r}) = {height:.3e} vanishes; rescaling undefined", r=r)
        self.base = base
        self.r = float(r)
        self.height = float(height)
        self.dim = base.dim
        self.cfg = base.cfg
        self.y_smooth = base.y_smooth
        self.kappa = base.kappa
        self.certificate = f"Almgren rescaling at r={r:g} of {type(base).__name__}"
        self.carries_flux = base.carries_flux
        self.norm = r ** (0.5 * base.cfg.a) / math.sqrt(height)
        potential = base.potential
        self.potential = None
        if potential is not None and not getattr(potential, "is_zero", False):
            self.potential = potential.rescaled(r)

    def __repr__(self) -> str:
        return f"<RescaledField(r={self.r:g}, H={self.height:.6g}, base={self.base!r})>"

    def bounds(self) -> Optional[Dict[str, float]]:
        window = self.base.bounds()
        if window is None:
            return None
        return {"x_half": window["x_half"] / self.r, "t_window": window["t_window"] / self.r**2}

    def _scale(self, sample: FieldSample) -> FieldSample:
        c = self.norm
        return FieldSample(
            c * sample.value,
            None if sample.grad_x is None else c * self.r * sample.grad_x,
            None if sample.d_y is None else c * self.r * sample.d_y,
            None if sample.d_t is None else c * self.r**2 * sample.d_t,
        )

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        t = np.asarray(t, dtype=float)
        return self._scale(self.base.evaluate(self.r * x, self.r * y, self.r**2 * t, derivatives))

    def evaluate_slice(self, x: np.ndarray, y: np.ndarray, t: float, derivatives: bool = True) -> FieldSample:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        return self._scale(self.base.evaluate_slice(self.r * x, self.r * y, self.r**2 * t, derivatives))

    def weighted_flux(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """y^a d_y U_r = r^{2s} (norm) (y^a U_y)(r X, r^2 t)."""
        flux = getattr(self.base, "weighted_flux", None)
        if flux is None:
            raise StructuralError(f"{type(self.base).__name__} has no weighted flux")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        scaled = flux(self.r * x, self.r * np.asarray(y, dtype=float), self.r**2 * np.asarray(t, dtype=float))
        return self.r ** (2.0 * self.cfg.s) * self.norm * scaled

    def boundary_flux(self, x: np.ndarray, t: np.ndarray) -> Optional[np.ndarray]:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        flux = self.base.boundary_flux(self.r * x, self.r**2 * np.asarray(t, dtype=float))
        if flux is None:
            return None
        return self.r ** (2.0 * self.cfg.s) * self.norm * flux


def almgren_rescale(
    U: ExtensionField, r: float, quad: Optional[GaussianQuadrature] = None
) -> RescaledField:
    """Normalized parabolic dilation of U at scale r; H(U_r, 1) = 1."""
    return RescaledField(U, r, height_average(U, r, quad))


def frequency_transport_check(
    U: ExtensionField,
    r: float,
    rhos: Sequence[float],
    quad: Optional[GaussianQuadrature] = None,
) -> Dict[str, Any]:
    """H(U_r, 1) - 1 and N1(U_r, rho) - N1(U, r rho) for each rho."""
    Ur = almgren_rescale(U, r, quad)
    normalization = height_average(Ur, 1.0, quad) - 1.0
    rows = []
    for rho in rhos:
        left = averaged_functionals(Ur, rho, quad).N1
        right = averaged_functionals(U, r * rho, quad).N1
        rows.append({"rho": rho, "N1_rescaled": left, "N1_original": right, "gap": abs(left - right)})
    return {"r": r, "normalization_residual": abs(normalization), "transport": rows}


@dataclass
class BlowupReport:
    r: np.ndarray
    distance: np.ndarray
    H: np.ndarray
    H_norm: np.ndarray
    kappa_running: np.ndarray
    kappa_hat: float
    N_smallest: float
    normalization_residual: float
    decaying: bool
    extras: Dict[str, Any] = field(default_factory=dict)

    COLUMNS = ("r", "distance", "H_norm", "kappa_running")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: getattr(self, name) for name in self.COLUMNS}, columns=list(self.COLUMNS))


def fit_kappa(r: np.ndarray, H: np.ndarray, a: float, count: int = KAPPA_FIT_COUNT) -> float:
    """kappa from the slope p of log H against log r over the smallest radii: p = 4 kappa + a."""
    r = np.asarray(r, dtype=float)
    H = np.asarray(H, dtype=float)
    usable = H > H_FLOOR
    order = np.argsort(r[usable])[:count]
    rs, hs = r[usable][order], H[usable][order]
    if rs.size < 2:
        return float("nan")
    slope = float(np.polyfit(np.log(rs), np.log(hs), 1)[0])
    return 0.25 * (slope - a)


def blowup_sequence(
    U: ExtensionField,
    radii: Sequence[float],
    quad: Optional[GaussianQuadrature] = None,
    fit_count: int = KAPPA_FIT_COUNT,
) -> BlowupReport:
    """Rescalings at decreasing radii, distances between successive ones and the fitted kappa."""
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii[:-1], radii[1:])):
        raise DomainError("blow-up radii must be strictly decreasing")
    a = U.cfg.a
    heights = np.array([height_average(U, r, quad) for r in radii])
    for r, H in zip(radii, heights):
        if not H > H_FLOOR:
            raise DegeneracyError(f"H(U, {r}) = {H:.3e} vanishes along the blow-up sequence", r=r)
    rescaled = [RescaledField(U, r, H) for r, H in zip(radii, heights)]
    h_norm = np.array([height_average(Ur, 1.0, quad) for Ur in rescaled])

    distance = [float("nan")]
    for prev, cur in zip(rescaled[:-1], rescaled[1:]):
        diff = LinearCombination([(1.0, cur), (-1.0, prev)])
        af = averaged_functionals(diff, 1.0, quad)
        distance.append(math.sqrt(max(af.H + af.weighted_gradient, 0.0)))
    distance_arr = np.array(distance)

    running = [float("nan")]
    for j in range(1, len(radii)):
        slope = math.log(heights[j] / heights[j - 1]) / math.log(radii[j] / radii[j - 1])
        running.append(0.25 * (slope - a))

    kappa_hat = fit_kappa(np.array(radii), heights, a, fit_count)
    n_small = averaged_functionals(U, min(radii), quad).N
    tail = distance_arr[1:]
    scale = max(1.0, float(np.nanmax(np.abs(tail)))) if tail.size else 1.0
    decaying = bool(tail.size < 2 or np.all(tail <= 1e-8 * scale) or tail[-1] <= tail[0])
    if not decaying:
        logger.warning(f"Blow-up distances do not decay: {tail.tolist()}")
    logger.info(f"Blow-up fit: kappa_hat={kappa_hat:.6g}, N(r_min)={n_small:.6g}")
    return BlowupReport(
        r=np.array(radii),
        distance=distance_arr,
        H=heights,
        H_norm=h_norm,
        kappa_running=np.array(running),
        kappa_hat=kappa_hat,
        N_smallest=n_small,
        normalization_residual=float(np.max(np.abs(h_norm - 1.0))),
        decaying=decaying,
    )


def rescaled_neumann_check(
    U: ExtensionField, r: float, points: Sequence[Sequence[float]], quad: Optional[GaussianQuadrature] = None
) -> Dict[str, float]:
    """lim y^a d_y U_r = -r^{2s} c_s^2 V(r x, r^2 t) U_r(x, 0, t) at evaluation points (x..., t)."""
    if U.potential is None or getattr(U.potential, "is_zero", False):
        raise PreconditionError("rescaled Neumann check needs a nonzero potential")
    Ur = almgren_rescale(U, r, quad)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = U.dim
    if pts.shape[1] != n + 1:
        raise StructuralError(f"points need {n + 1} coordinates (x..., t)")
    x, t = pts[:, :n], pts[:, n]
    flux = np.real(Ur.weighted_flux(x, np.zeros(t.size), t))
    expected = -np.real(Ur.potential.neumann_coefficient(x, t)) * np.real(Ur.trace(x, t))
    scale = max(float(np.max(np.abs(expected))), H_FLOOR)
    deviation = float(np.max(np.abs(flux - expected))) / scale
    return {"r": r, "max_relative_deviation": deviation}


Evaluator = Union[SpaceTimeField, ExtensionField, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass
class VanishingOrderReport:
    center: Tuple[Tuple[float, ...], float]
    r: np.ndarray
    sup: np.ndarray
    log_slope: np.ndarray
    order: float
    infinite: bool

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.r, "sup": self.sup, "log_slope": self.log_slope})


def _sampler(u: Evaluator, cylinder: ParabolicCylinder) -> Tuple[Callable[..., np.ndarray], bool]:
    if isinstance(u, SpaceTimeField):
        grid = u.grid
        if cylinder.t0 > 0 or cylinder.t0 - cylinder.r**2 < -grid.t_window_time:
            raise StructuralError(f"cylinder time range leaves the grid window at r={cylinder.r}")
        if np.max(np.abs(cylinder.x0)) + cylinder.r > 0.5 * grid.x_period_length:
            raise StructuralError(f"cylinder leaves the spatial period at r={cylinder.r}")
        return lambda x, y, t: np.abs(u.evaluate(x, t)), False
    if isinstance(u, ExtensionField):
        return lambda x, y, t: np.abs(u.evaluate(x, y, t, derivatives=False).value), True
    if callable(u):
        return lambda x, y, t: np.abs(np.asarray(u(x, t), dtype=complex)), False
    raise StructuralError(f"cannot sample {type(u).__name__}")


def cylinder_sup(
    u: Evaluator, cylinder: ParabolicCylinder, points: int = 9, t_range: Optional[Tuple[float, float]] = None
) -> float:
    """Dense-sampled sup over the cylinder with one Richardson step S_f + (S_f - S_c)/3, never below S_f."""
    evaluate, half_ball = _sampler(u, cylinder)
    coarse = float(np.max(evaluate(*cylinder.sample(points, half_ball, t_range))))
    fine = float(np.max(evaluate(*cylinder.sample(2 * points - 1, half_ball, t_range))))
    return max(fine, fine + (fine - coarse) / 3.0)


def vanishing_order(
    u: Evaluator,
    x0: Sequence[float],
    t0: float,
    radii: Sequence[float],
    points: int = 9,
    floor: float = SUP_FLOOR,
    slope_cap: float = SLOPE_CAP,
) -> VanishingOrderReport:
    """Least-squares slope of log sup_{Q_r} |u| against log r; infinite when the sup underflows.

    Extension fields are sampled over half-balls in X = (x, y).
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 2:
        raise StructuralError("vanishing order needs at least two radii")
    center = tuple(float(c) for c in x0)
    sups = np.array([cylinder_sup(u, ParabolicCylinder(center, float(t0), r), points) for r in radii])
    r_arr = np.array(radii)
    above = sups > floor
    slopes = [float("nan")]
    for j in range(1, r_arr.size):
        if above[j] and above[j - 1]:
            slopes.append(math.log(sups[j] / sups[j - 1]) / math.log(r_arr[j] / r_arr[j - 1]))
        else:
            slopes.append(float("inf"))
    slope_arr = np.array(slopes)
    # radii ascend: index 1 is the slope across the two smallest radii
    smallest_slope = slope_arr[1]
    infinite = bool(not above[0] or smallest_slope > slope_cap)
    if infinite:
        order = float("inf")
    elif np.count_nonzero(above) >= 2:
        order = float(np.polyfit(np.log(r_arr[above]), np.log(sups[above]), 1)[0])
    else:
        order = float("nan")
    logger.info(f"Vanishing order at ({list(center)}, {t0}): {order}")
    return VanishingOrderReport((center, float(t0)), r_arr, sups, slope_arr, order, infinite)


@dataclass
class NondegeneracyReport:
    r0: float
    exponent: float
    slack: float
    holds: bool
    interior_zero: bool


def nondegeneracy_check(
    curve: FrequencyCurve, r0: Optional[float] = None, tolerance: float = 1e-6
) -> NondegeneracyReport:
    """H(r) >= H(r0) (r/r0)^{4 ||N||_inf + a} at every sampled r <= r0; slack = min log ratio."""
    r = np.asarray(curve.r, dtype=float)
    H = np.asarray(curve.H, dtype=float)
    r0 = float(np.max(r)) if r0 is None else float(r0)
    idx = int(np.argmin(np.abs(r - r0)))
    if not np.isclose(r[idx], r0):
        raise DomainError(f"r0={r0} is not a sampled radius")
    H0 = H[idx]
    if not H0 > H_FLOOR:
        raise DegeneracyError(f"H(r0={r0}) vanishes", r=r0)
    window = r <= r0
    interior_zero = bool(np.any(~(H[window] > H_FLOOR)))
    adjusted = np.asarray(curve.adjusted, dtype=float)[window]
    nbar = float(np.nanmax(np.abs(adjusted))) if adjusted.size else 0.0
    a = 1.0 - 2.0 * curve.s
    exponent = 4.0 * nbar + a
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.log(H[window] / (H0 * (r[window] / r0) ** exponent))
    slack = float(np.nanmin(ratios)) if ratios.size else 0.0
    holds = (not interior_zero) and slack >= -tolerance
    return NondegeneracyReport(r0=r0, exponent=exponent, slack=slack, holds=holds, interior_zero=interior_zero)



@dataclass
class HarnackReport:
    r: np.ndarray
    sup: np.ndarray
    inf: np.ndarray
    C_hat: np.ndarray
    psi_norm: float
    spread: float
    equation_residual: float = float("nan")
    potential_shift: float = 0.0
    rows: List[Dict[str, float]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.r, "sup": self.sup, "inf": self.inf, "C_hat": self.C_hat})


def shifted_potential(
    u_samples: np.ndarray, V_samples: np.ndarray, psi_samples: np.ndarray, cfg: FracConfig
) -> np.ndarray:
    """V - psi / (c_s u): the potential that keeps H^s u = c_s V u + psi once psi is added with u fixed."""
    if not np.any(psi_samples):
        return V_samples
    bad = (u_samples <= 0) & (psi_samples != 0)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise PreconditionError("psi shift needs u > 0 wherever psi is nonzero", location={"index": idx})
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(psi_samples != 0, psi_samples / (cfg.c_s * u_samples), 0.0)
    return V_samples - shift


def harnack_quotient(
    u: SpaceTimeField,
    s: float,
    radii: Sequence[float],
    potential: Optional[Any] = None,
    psi: Optional[Union[SpaceTimeField, float]] = None,
    x0: Optional[Sequence[float]] = None,
    t0: float = 0.0,
    points: int = 9,
    check_equation: bool = True,
    equation_tolerance: float = 1e-6,
) -> HarnackReport:
    """C_hat(r) = sup_{B_r x (-r^2, -r^2/2)} u / (inf_{B_r x (-r^2/4, 0)} u + r^{2s} ||psi||)."""
    grid = u.grid
    x0 = tuple([0.0] * grid.dim if x0 is None else (float(c) for c in x0))
    samples = u.samples.real if u.is_real else u.samples
    if np.iscomplexobj(samples) or float(np.min(samples)) < 0:
        idx = np.unravel_index(int(np.argmin(np.real(samples))), grid.shape)
        xs, t = grid.mesh()
        raise PreconditionError(
            f"Harnack data must be real and nonnegative; min at x={[float(x[idx]) for x in xs]}",
            location={"index": tuple(int(i) for i in idx), "t": float(t[idx])},
        )
    if isinstance(psi, SpaceTimeField):
        psi_norm = psi.sup_norm()
    else:
        psi_norm = abs(float(psi or 0.0))

    residual = float("nan")
    potential_shift = 0.0
    if check_equation:
        cfg = FracConfig(s=s)
        lhs = frac_heat_multiplier(u, cfg)
        if isinstance(psi, SpaceTimeField):
            psi_samples = np.real(psi.samples)
        else:
            psi_samples = np.full(grid.shape, float(psi or 0.0))
        base = np.zeros(grid.shape) if potential is None else np.real(potential.values)
        shifted = shifted_potential(samples, base, psi_samples, cfg)
        potential_shift = float(np.max(np.abs(shifted - base)))
        rhs_samples = cfg.c_s * shifted * samples + psi_samples
        rhs = SpaceTimeField(grid, samples=rhs_samples)
        residual = relative_l2(lhs, rhs) if lhs.l2_norm() > 0 else (lhs - rhs).l2_norm()
        if residual > equation_tolerance:
            raise PreconditionError(f"(u, V, psi) do not satisfy H^s u = c_s V u + psi: residual {residual:.3e}")

    sups, infs, quotients = [], [], []
    for r in radii:
        cyl = ParabolicCylinder(x0, t0, float(r))
        early = cylinder_sup(u, cyl, points, t_range=(1.0, 0.5))
        evaluate, _ = _sampler(u, cyl)
        late = float(np.min(evaluate(*cyl.sample(2 * points - 1, False, (0.25, 0.0)))))
        denom = late + float(r) ** (2.0 * s) * psi_norm
        sups.append(early)
        infs.append(late)
        quotients.append(early / denom if denom > 0 else float("inf"))
    C_hat = np.array(quotients)
    finite = C_hat[np.isfinite(C_hat)]
    spread = float(np.max(finite) / np.min(finite) - 1.0) if finite.size else float("nan")
    logger.info(f"Harnack quotients {C_hat.tolist()} (spread {spread:.3g})")
    return HarnackReport(
        r=np.asarray(radii, dtype=float),
        sup=np.array(sups),
        inf=np.array(infs),
        C_hat=C_hat,
        psi_norm=psi_norm,
        spread=spread,
        equation_residual=residual,
        potential_shift=potential_shift,
    )
