"""Gaussian-weighted height, energy and frequency of extension fields.

Every Gaussian integral is taken over the y-even reflection of U, weight |y|^a, and
evaluated per time slice after the scaling X = sqrt(4|t|) X', so that one tensor
rule in (x', y') with weight exp(-|x'|^2) (y')^a exp(-(y')^2) serves every t:

    h(t) = 2 (4|t|)^{a/2} pi^{-(n+1)/2} sum_k W_k U(sqrt(4|t|) X'_k, t)^2.

Time averages over (-r^2, 0) use t = -r^2 tau with a tanh-sinh rule on (0, 1).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from .errors import DomainError, StructuralError
from .extension import ExtensionField
from .quadrature import Rule, half_range_exp_sinh, half_range_gauss, hermite_tensor, tanh_sinh_unit
from .reduction import stable_sum, weighted_sum

logger = logging.getLogger(__name__)

H_FLOOR = 1e-300
MONOTONE_SLACK = 1e-8
C_MAX = 1e3
C_RESOLUTION = 1e-3


class BackwardGaussian:
    """G_bar(X, t) = (4 pi |t - t0|)^{-(n+1)/2} exp(-|X - X0|^2 / 4|t - t0|) for t < t0."""

    def __init__(self, dim: int = 1, x0: Optional[Sequence[float]] = None, t0: float = 0.0):
        self.dim = dim
        self.x0 = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float)
        if self.x0.shape != (dim,):
            raise StructuralError(f"center needs {dim} space coordinates")
        self.t0 = float(t0)

    def _lag(self, t: np.ndarray) -> np.ndarray:
        lag = self.t0 - np.asarray(t, dtype=float)
        if np.any(lag <= 0):
            raise DomainError("backward Gaussian is defined for t < t0 only")
        return lag

    def G(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Space factor (4 pi |t|)^{-n/2} exp(-|x - x0|^2 / 4|t|)."""
        lag = self._lag(t)
        x = np.atleast_2d(x)
        r2 = np.sum((x - self.x0) ** 2, axis=1)
        return (4.0 * math.pi * lag) ** (-0.5 * self.dim) * np.exp(-r2 / (4.0 * lag))

    def K(self, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Normal factor (4 pi |t|)^{-1/2} exp(-y^2 / 4|t|)."""
        lag = self._lag(t)
        return (4.0 * math.pi * lag) ** -0.5 * np.exp(-np.asarray(y) ** 2 / (4.0 * lag))

    def value(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        return self.G(x, t) * self.K(y, t)

    def gradient(self, x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """grad G_bar = (X - X0) / (2 (t - t0)) G_bar, shape (P, n + 1)."""
        x = np.atleast_2d(x)
        X = np.concatenate([x - self.x0, np.asarray(y, dtype=float)[:, None]], axis=1)
        factor = self.value(x, y, t) / (2.0 * (np.asarray(t, dtype=float) - self.t0))
        return X * factor[:, None]


class GaussianQuadrature(BaseModel):
    """Per-slice tensor rule in (x', y') and the tanh-sinh rule in the averaged time."""

    model_config = ConfigDict(frozen=True)

    hermite_nodes: int = Field(default=40, ge=8)
    y_nodes: int = Field(default=40, ge=8)
    y_de_step: float = Field(default=1.0 / 32.0, gt=0.0, le=0.25)
    time_step: float = Field(default=0.1, gt=0.0, le=0.5)
    time_span: float = Field(default=3.6, gt=1.0)
    truncation: float = Field(default=10.0, gt=4.0)

    def space_rule(self, dim: int) -> Rule:
        return hermite_tensor(self.hermite_nodes, dim, self.truncation)

    def y_rule(self, a: float, smooth: bool) -> Rule:
        """Gauss rule for fields polynomial in y^2, exp-sinh otherwise."""
        if smooth:
            return half_range_gauss(a, self.y_nodes)
        return half_range_exp_sinh(a, self.y_de_step)

    def time_rule(self) -> Rule:
        return tanh_sinh_unit(self.time_step, self.time_span)

    def refined(self) -> "GaussianQuadrature":
        return self.model_copy(
            update={
                "hermite_nodes": 2 * self.hermite_nodes,
                "y_nodes": 2 * self.y_nodes,
                "y_de_step": 0.5 * self.y_de_step,
                "time_step": 0.5 * self.time_step,
            }
        )

    def weighted_mass(self, a: float, t: float, dim: int = 1) -> float:
        """Quadrature value of int |y|^a G_bar(X, t) dX over R^{n+1}."""
        x, wx = self.space_rule(dim)
        y, wy = self.y_rule(a, smooth=True)
        pref = 2.0 * (4.0 * abs(t)) ** (0.5 * a) * math.pi ** (-0.5 * (dim + 1))
        return pref * stable_sum(np.outer(wx, wy))


def gaussian_mass_exact(a: float, t: float) -> float:
    """2^a Gamma((a+1)/2) / sqrt(pi) |t|^{a/2}."""
    return 2.0**a * math.gamma(0.5 * (a + 1.0)) / math.sqrt(math.pi) * abs(t) ** (0.5 * a)


@dataclass
class SliceIntegrals:
    """Single-time Gaussian integrals, already doubled for the even reflection."""

    t: float
    height: float
    gradient: float
    boundary: float = 0.0
    u_zu: float = float("nan")
    zu_sq: float = float("nan")
    trace_mass: float = float("nan")

    @property
    def energy(self) -> float:
        """i(t) = |t| (int |y|^a |grad U|^2 G_bar - 2 int c_s^2 V u^2 G_bar(x, 0, t) dx)."""
        return abs(self.t) * (self.gradient - self.boundary)


def _default(quad: Optional[GaussianQuadrature]) -> GaussianQuadrature:
    return quad or GaussianQuadrature()


def _resolve_potential(U: ExtensionField, potential: Optional[Any]) -> Optional[Any]:
    chosen = potential if potential is not None else U.potential
    if chosen is None or getattr(chosen, "is_zero", False):
        return None
    return chosen


def _check_time(U: ExtensionField, t: float) -> None:
    if t >= 0:
        raise DomainError(f"Gaussian functionals need t < 0, got t={t}")
    window = U.bounds()
    if window is not None and t < -window["t_window"]:
        raise DomainError(f"t={t} lies before the sampled window (-{window['t_window']}, 0)")


def _check_radius(U: ExtensionField, r: float) -> None:
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    window = U.bounds()
    if window is not None and r**2 > window["t_window"]:
        raise DomainError(f"r={r} exceeds sqrt of the time window {window['t_window']}")


def slice_integrals(
    U: ExtensionField,
    t: float,
    quad: Optional[GaussianQuadrature] = None,
    potential: Optional[Any] = None,
    derivatives: bool = True,
    with_z: bool = False,
    with_trace: bool = False,
) -> SliceIntegrals:
    """All Gaussian integrals of U needed at one time t < 0."""
    quad = _default(quad)
    _check_time(U, t)
    a = U.cfg.a
    n = U.dim
    scale = math.sqrt(4.0 * abs(t))
    xq, wx = quad.space_rule(n)
    yq, wy = quad.y_rule(a, U.y_smooth)
    X = scale * xq
    Y = scale * yq
    W = np.outer(wx, wy)
    pref = 2.0 * (4.0 * abs(t)) ** (0.5 * a) * math.pi ** (-0.5 * (n + 1))

    sample = U.evaluate_slice(X, Y, t, derivatives=derivatives)
    out = SliceIntegrals(t=t, height=pref * weighted_sum(W, np.abs(sample.value) ** 2), gradient=float("nan"))
    if derivatives:
        out.gradient = pref * weighted_sum(W, sample.grad_sq())
        if with_z:
            zu = (
                np.einsum("pd,pqd->pq", X, sample.grad_x)
                + Y[None, :] * sample.d_y
                + 2.0 * t * sample.d_t
            )
            out.u_zu = pref * weighted_sum(W, np.real(np.conj(sample.value) * zu))
            out.zu_sq = pref * weighted_sum(W, np.abs(zu) ** 2)

    chosen = _resolve_potential(U, potential)
    flux = None
    if derivatives and chosen is None and U.carries_flux:
        flux = U.boundary_flux(X, np.full(X.shape[0], t))
    if (derivatives and chosen is not None) or flux is not None or with_trace:
        tt = np.full(X.shape[0], t)
        u = U.trace(X, tt)
        edge = (4.0 * math.pi * abs(t)) ** -0.5 * math.pi ** (-0.5 * n)
        if chosen is not None:
            coef = np.real(chosen.neumann_coefficient(X, tt))
            out.boundary = 2.0 * edge * weighted_sum(wx, coef * np.abs(u) ** 2)
        elif flux is not None:
            # lim y^a U_y = -c_s^2 V u, so -u times the flux plays the role of c_s^2 V u^2
            out.boundary = -2.0 * edge * weighted_sum(wx, np.real(np.conj(u) * flux))
        out.trace_mass = edge * weighted_sum(wx, np.abs(u) ** 2)
    return out


def z_apply(U: ExtensionField, x: Sequence[float], y: float, t: float) -> float:
    """Z U = <X, grad U> + 2 t U_t at one point."""
    value = U.z_apply(np.atleast_2d(np.asarray(x, dtype=float)), np.array([y]), np.array([t]))
    return float(np.real(value[0]))


def height(U: ExtensionField, t: float, quad: Optional[GaussianQuadrature] = None) -> float:
    """h(t) = int |y|^a U(X, t)^2 G_bar(X, t) dX."""
    return slice_integrals(U, t, quad, derivatives=False).height


def energy_t(
    U: ExtensionField, t: float, quad: Optional[GaussianQuadrature] = None, potential: Optional[Any] = None
) -> float:
    """i(t) = |t| int |y|^a |grad U|^2 G_bar - |t| int 2 c_s^2 V u^2 G_bar(x, 0, t) dx."""
    return slice_integrals(U, t, quad, potential).energy


def energy_identity_t(
    U: ExtensionField, t: float, quad: Optional[GaussianQuadrature] = None, potential: Optional[Any] = None
) -> Dict[str, float]:
    """i(t) against (1/2) int |y|^a U ZU G_bar at a single time."""
    sl = slice_integrals(U, t, quad, potential, with_z=True)
    alt = 0.5 * sl.u_zu
    scale = max(abs(sl.energy), abs(alt), sl.height, H_FLOOR)
    return {"t": t, "energy": sl.energy, "energy_alt": alt, "gap": abs(sl.energy - alt) / scale}


def trace_ratio(
    U: ExtensionField, t: float, quad: Optional[GaussianQuadrature] = None, potential: Optional[Any] = None
) -> float:
    """int u^2 G_bar(x, 0, t) dx / (|t|^{s-1} (i(t) + h(t))); reported, never asserted."""
    sl = slice_integrals(U, t, quad, potential, with_trace=True)
    denom = abs(t) ** (U.cfg.s - 1.0) * (sl.energy + sl.height)
    if denom <= 0:
        return float("nan")
    return sl.trace_mass / denom


@dataclass
class AveragedFunctionals:
    r: float
    H: float
    I: float
    N: float
    N1: float
    I_alt: float
    weighted_gradient: float
    cs_core: float
    cs_scale: float
    degenerate: bool

    @property
    def identity_gap(self) -> float:
        scale = max(abs(self.I), abs(self.I_alt), H_FLOOR)
        return abs(self.I - self.I_alt) / scale


def height_average(U: ExtensionField, r: float, quad: Optional[GaussianQuadrature] = None) -> float:
    """H(U, r) = (1/r^2) int_{-r^2}^0 h(t) dt."""
    quad = _default(quad)
    _check_radius(U, r)
    tau, w = quad.time_rule()
    values = [slice_integrals(U, -r * r * tj, quad, derivatives=False).height for tj in tau]
    return weighted_sum(w, np.array(values))


def averaged_functionals(
    U: ExtensionField,
    r: float,
    quad: Optional[GaussianQuadrature] = None,
    potential: Optional[Any] = None,
) -> AveragedFunctionals:
    """H, I, N = I/H, N1 and the alternative energy (1/2r^2) int |y|^a U ZU G_bar over the strip."""
    quad = _default(quad)
    _check_radius(U, r)
    tau, w = quad.time_rule()
    slices = [slice_integrals(U, -r * r * tj, quad, potential, with_z=True) for tj in tau]
    H = weighted_sum(w, np.array([sl.height for sl in slices]))
    I = weighted_sum(w, np.array([sl.energy for sl in slices]))
    grad = weighted_sum(w, np.array([abs(sl.t) * sl.gradient for sl in slices]))
    uzu = weighted_sum(w, np.array([sl.u_zu for sl in slices]))
    zz = weighted_sum(w, np.array([sl.zu_sq for sl in slices]))
    degenerate = not H > H_FLOOR
    if degenerate:
        logger.warning(f"Degenerate height H(r={r:.6g}) = {H:.3e}; frequency undefined")
    return AveragedFunctionals(
        r=r,
        H=H,
        I=I,
        N=float("nan") if degenerate else I / H,
        N1=float("nan") if degenerate else grad / H,
        I_alt=0.5 * uzu,
        weighted_gradient=grad,
        cs_core=zz * H - uzu**2,
        cs_scale=zz * H,
        degenerate=degenerate,
    )


def _orders(residuals: List[float], floor: float) -> List[float]:
    orders = []
    for r1, r2 in zip(residuals[:-1], residuals[1:]):
        orders.append(math.log2(r1 / r2) if r1 > floor and r2 > floor else float("nan"))
    return orders


def first_variation_check(
    U: ExtensionField,
    r: float,
    dr: Optional[float] = None,
    quad: Optional[GaussianQuadrature] = None,
    potential: Optional[Any] = None,
    steps: int = 3,
) -> Dict[str, Any]:
    """Central differences of H against H'(r) = (4/r) I(r) + (a/r) H(r) on dr, dr/2, dr/4."""
    quad = _default(quad)
    dr = 0.02 * r if dr is None else dr
    if not 0 < dr < r:
        raise DomainError(f"need 0 < dr < r, got dr={dr}, r={r}")
    base = averaged_functionals(U, r, quad, potential)
    formula = (4.0 / r) * base.I + (U.cfg.a / r) * base.H
    hs = [dr / 2**k for k in range(steps)]
    fd, residuals = [], []
    for h in hs:
        d = (height_average(U, r + h, quad) - height_average(U, r - h, quad)) / (2.0 * h)
        fd.append(d)
        residuals.append(abs(d - formula))
    floor = 1e-10 * max(abs(formula), base.H / r, H_FLOOR)
    orders = _orders(residuals, floor)
    exact = all(res <= floor for res in residuals)
    return {
        "r": r,
        "dr": hs,
        "dH_fd": fd,
        "dH_formula": formula,
        "residual": residuals,
        "order": orders,
        "exact": exact,
    }


def centered_first_variation(
    U: ExtensionField,
    t0: float,
    r: float,
    dr: Optional[float] = None,
    quad: Optional[GaussianQuadrature] = None,
    steps: int = 3,
) -> Dict[str, Any]:
    """The same check for the centered height: h~'(r) = (4/r) i~(r) + (a/r) h~(r)."""
    dr = 0.02 * r if dr is None else dr
    base = centered_frequency(U, t0, r, quad)
    formula = (4.0 / r) * base["i"] + (U.cfg.a / r) * base["h"]
    hs = [dr / 2**k for k in range(steps)]
    residuals = []
    for h in hs:
        up = centered_frequency(U, t0, r + h, quad)["h"]
        down = centered_frequency(U, t0, r - h, quad)["h"]
        residuals.append(abs((up - down) / (2.0 * h) - formula))
    floor = 1e-10 * max(abs(formula), base["h"] / r, H_FLOOR)
    return {
        "r": r,
        "dr": hs,
        "residual": residuals,
        "order": _orders(residuals, floor),
        "exact": all(res <= floor for res in residuals),
    }


def psi(r: np.ndarray, s: float) -> np.ndarray:
    """int_0^r t^{-a} dt = r^{2s} / (2s)."""
    return np.asarray(r, dtype=float) ** (2.0 * s) / (2.0 * s)


def adjusted_quantity(r: np.ndarray, N: np.ndarray, C: float, s: float) -> np.ndarray:
    """exp(C psi(r)) (N(r) + C psi(r))."""
    p = psi(r, s)
    return np.exp(C * p) * (np.asarray(N, dtype=float) + C * p)


def is_nondecreasing(values: np.ndarray, slack: float = MONOTONE_SLACK) -> bool:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return True
    if not np.all(np.isfinite(values)):
        return False
    return bool(np.all(np.diff(values) >= -slack))


def calibrate_C(
    r: np.ndarray,
    N: np.ndarray,
    s: float,
    C_max: float = C_MAX,
    resolution: float = C_RESOLUTION,
    slack: float = MONOTONE_SLACK,
) -> Optional[float]:
    """Smallest C in [0, C_max], to the given resolution, making the adjusted quantity nondecreasing.

    Returns None when even C_max fails.
    """
    order = np.argsort(r)
    r = np.asarray(r, dtype=float)[order]
    N = np.asarray(N, dtype=float)[order]

    def ok(C: float) -> bool:
        return is_nondecreasing(adjusted_quantity(r, N, C, s), slack)

    if ok(0.0):
        return 0.0
    if not ok(C_max):
        logger.warning(f"No C <= {C_max:g} monotonizes the sampled frequency")
        return None
    lo, hi = 0.0, C_max
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    logger.info(f"Calibrated C = {hi:.6g}")
    return hi


class CurveOptions(BaseModel):
    """Knobs for adjusted_frequency_curve."""

    model_config = ConfigDict(frozen=True)

    slack: float = Field(default=MONOTONE_SLACK, ge=0.0)
    dr_fraction: float = Field(default=1e-3, gt=0.0, lt=0.5)
    calibrate: bool = False
    monitor_ck: bool = True
    C_max: float = Field(default=C_MAX, gt=0.0)


@dataclass
class FrequencyCurve:
    r: np.ndarray
    H: np.ndarray
    I: np.ndarray
    N: np.ndarray
    N1: np.ndarray
    psi: np.ndarray
    adjusted: np.ndarray
    dH_fd: np.ndarray
    dH_formula: np.ndarray
    flag: List[str]
    C: float
    monotone: bool
    truncated: bool = False
    K1: float = float("nan")
    C_calibrated: Optional[float] = None
    ck_monitor: float = float("nan")
    identity_gap: float = float("nan")
    cs_core_min: float = float("nan")
    s: float = float("nan")
    extras: Dict[str, Any] = field(default_factory=dict)

    COLUMNS = ("r", "H", "I", "N", "N1", "psi", "adjusted", "dH_fd", "dH_formula", "flag")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: getattr(self, name) for name in self.COLUMNS}, columns=list(self.COLUMNS))


def adjusted_frequency_curve(
    U: ExtensionField,
    radii: Sequence[float],
    C: float = 0.0,
    quad: Optional[GaussianQuadrature] = None,
    potential: Optional[Any] = None,
    options: Optional[CurveOptions] = None,
) -> FrequencyCurve:
    """H, I, N, N1 and the adjusted quantity on increasing radii, with the monotonicity verdict.

    With V = 0 and no Neumann flux of its own, the verdict asks N itself to be
    nondecreasing; otherwise the adjusted quantity for the given C. Sampling stops
    at the first degenerate radius.
    """
    quad = _default(quad)
    options = options or CurveOptions()
    if C < 0:
        raise DomainError(f"C must be nonnegative, got {C}")
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii[:-1], radii[1:])):
        raise DomainError("radii must be strictly increasing")
    chosen = _resolve_potential(U, potential)
    s = U.cfg.s
    a = U.cfg.a

    rows: List[AveragedFunctionals] = []
    dh_fd: List[float] = []
    flags: List[str] = []
    truncated = False
    for r in radii:
        af = averaged_functionals(U, r, quad, chosen)
        rows.append(af)
        if af.degenerate:
            flags.append("degenerate")
            dh_fd.append(float("nan"))
            truncated = True
            break
        h = options.dr_fraction * r
        dh_fd.append((height_average(U, r + h, quad) - height_average(U, r - h, quad)) / (2.0 * h))
        flags.append("ok")

    r_arr = np.array([row.r for row in rows])
    H = np.array([row.H for row in rows])
    I = np.array([row.I for row in rows])
    N = np.array([row.N for row in rows])
    N1 = np.array([row.N1 for row in rows])
    p = psi(r_arr, s)
    adjusted = adjusted_quantity(r_arr, N, C, s)
    formula = (4.0 / r_arr) * I + (a / r_arr) * H
    valid = np.array([f == "ok" for f in flags])

    pure = chosen is None and not U.carries_flux
    target = N if pure else adjusted
    monotone = (not truncated) and is_nondecreasing(target[valid], options.slack)

    K1 = float("nan")
    if np.any(valid):
        gap = np.abs(N[valid] - N1[valid]) / (r_arr[valid] ** (2.0 * s) * (N1[valid] + 1.0))
        K1 = float(np.max(gap))

    curve = FrequencyCurve(
        r=r_arr,
        H=H,
        I=I,
        N=N,
        N1=N1,
        psi=p,
        adjusted=adjusted,
        dH_fd=np.array(dh_fd),
        dH_formula=formula,
        flag=flags,
        C=C,
        s=s,
        monotone=monotone,
        truncated=truncated,
        K1=K1,
        identity_gap=max((row.identity_gap for row in rows if not row.degenerate), default=float("nan")),
        cs_core_min=min(
            (row.cs_core / max(row.cs_scale, H_FLOOR) for row in rows if not row.degenerate),
            default=float("nan"),
        ),
    )
    if options.calibrate and np.any(valid):
        curve.C_calibrated = calibrate_C(r_arr[valid], N[valid], s, options.C_max, slack=options.slack)
    if options.monitor_ck and chosen is not None and np.any(valid):
        curve.ck_monitor = C * getattr(chosen, "K", float("nan")) * (r_arr[valid][-1] ** 2) ** s
    if not monotone and not truncated:
        logger.warning(f"Frequency curve not monotone for C={C:g}")
    logger.info(
        f"Frequency curve on {len(rows)} radii: N in [{np.nanmin(N):.6g}, {np.nanmax(N):.6g}], monotone={monotone}"
    )
    return curve


def _centered_guard(t0: float, r: float) -> None:
    if t0 >= 0:
        raise DomainError(f"center time must be negative, got {t0}")
    lag = abs(t0 - r * r)
    upper = min(0.5 * (abs(t0) + 1.0), 2.0 * abs(t0))
    if not (upper > lag > abs(t0)):
        raise DomainError(
            f"r={r} violates the centered range guard: need {upper:.6g} > |t0 - r^2| = {lag:.6g} > |t0| = {abs(t0):.6g}"
        )


class _TimeShifted(ExtensionField):
    """U0(X, t0 + t): the centered functionals are the plain ones of the shifted field."""

    def __init__(self, base: ExtensionField, t0: float):
        self.base = base
        self.t0 = t0
        self.dim = base.dim
        self.cfg = base.cfg
        self.y_smooth = base.y_smooth
        self.kappa = None
        self.carries_flux = base.carries_flux
        self.potential = None if base.potential is None else _ShiftedPotential(base.potential, t0)

    def bounds(self) -> Optional[Dict[str, float]]:
        window = self.base.bounds()
        if window is None:
            return None
        return {"x_half": window["x_half"], "t_window": window["t_window"] + self.t0}

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True):
        return self.base.evaluate(x, y, np.asarray(t, dtype=float) + self.t0, derivatives)

    def evaluate_slice(self, x: np.ndarray, y: np.ndarray, t: float, derivatives: bool = True):
        return self.base.evaluate_slice(x, y, t + self.t0, derivatives)

    def boundary_flux(self, x: np.ndarray, t: np.ndarray) -> Optional[np.ndarray]:
        return self.base.boundary_flux(x, np.asarray(t, dtype=float) + self.t0)


class _ShiftedPotential:
    def __init__(self, base: Any, t0: float):
        self.base = base
        self.t0 = t0
        self.is_zero = bool(getattr(base, "is_zero", False))

    def neumann_coefficient(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        return self.base.neumann_coefficient(x, np.asarray(t, dtype=float) + self.t0)


def centered_frequency(
    U0: ExtensionField, t0: float, r: float, quad: Optional[GaussianQuadrature] = None
) -> Dict[str, float]:
    """h~(r), i~(r), n~(r) = i~/h~ at the single time t0 - r^2 with the Gaussian centered at (0, t0)."""
    _centered_guard(t0, r)
    shifted = _TimeShifted(U0, t0)
    sl = slice_integrals(shifted, -r * r, quad)
    h = sl.height
    i = sl.energy
    n = float("nan") if not h > H_FLOOR else i / h
    return {"r": r, "h": h, "i": i, "n": n}


def gaussian_energy(
    U: ExtensionField, r: float, quad: Optional[GaussianQuadrature] = None
) -> Dict[str, float]:
    """(1/r^2) int int |y|^a |grad U|^2 G_bar over the strip, on the rule and on its refinement."""
    quad = _default(quad)
    _check_radius(U, r)

    def energy(q: GaussianQuadrature) -> float:
        tau, w = q.time_rule()
        return weighted_sum(w, np.array([slice_integrals(U, -r * r * tj, q).gradient for tj in tau]))

    coarse = energy(quad)
    fine = energy(quad.refined())
    change = abs(fine - coarse) / max(abs(fine), H_FLOOR)
    return {"r": r, "energy": coarse, "refined": fine, "relative_change": change}
