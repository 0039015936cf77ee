"""Experiment handlers: one function per experiment kind.

Each handler takes the shared ScenarioContext, the experiment model and the
run's tolerance scale, and returns an Outcome with a status, JSON-safe metrics
and the tables to write. The main table is keyed "" and lands in "<id>.csv";
any other key k lands in "<id>-<k>.csv".
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ..lab.blowup import (
    blowup_sequence,
    frequency_transport_check,
    harnack_quotient,
    nondegeneracy_check,
    rescaled_neumann_check,
    vanishing_order,
)
from ..lab.errors import DomainError, PreconditionError
from ..lab.extension import (
    Box,
    SpectralExtension,
    boundary_convergence,
    neumann_decay_bound,
    neumann_trace,
    poisson_check,
    residual_convergence,
)
from ..lab.fracheat import FracConfig, frac_heat_balakrishnan, frac_heat_multiplier, relative_l2
from ..lab.frequency import (
    CurveOptions,
    adjusted_frequency_curve,
    adjusted_quantity,
    centered_frequency,
    first_variation_check,
    psi,
)
from ..models.scenario import (
    BlowupExperiment,
    CalibrateExperiment,
    ExtendCheckExperiment,
    FrequencyExperiment,
    HarnackExperiment,
    OpCheckExperiment,
    VanishingOrderExperiment,
)
from .context import ScenarioContext

logger = logging.getLogger(__name__)

ORDER_TARGET = 2.0
ORDER_TOLERANCE = 0.2
EXPONENT_TOLERANCE = 0.05
RESCALING_TOLERANCE = 1e-8
TRANSPORT_RHOS = (0.5, 1.0, 2.0)


@dataclass
class Outcome:
    status: str
    metrics: Dict[str, Any] = field(default_factory=dict)
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)


def jsonable(value: Any) -> Any:
    """Plain Python scalars and containers for report.json."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _order_ok(report: Dict[str, Any], scale: float) -> bool:
    if report["exact"]:
        return True
    orders = [o for o in report["order"] if math.isfinite(o)]
    return bool(orders) and abs(orders[-1] - ORDER_TARGET) <= ORDER_TOLERANCE * scale


def _checks_frame(checks: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(checks, columns=["check", "value", "limit", "passed"])


def default_eval_points(dim: int) -> List[List[float]]:
    """Extension points (x..., y, t) inside the Poisson check's y range."""
    return [
        [0.3] * dim + [0.5, -1.0],
        [-0.7] * dim + [1.5, -0.25],
        [1.1] * dim + [0.2, -2.5],
    ]


def _require_spectral(ctx: ScenarioContext, kind: str) -> None:
    if ctx.u is None:
        raise PreconditionError(f"{kind} needs sampled boundary data (field kind 'modes' or 'random')")


def run_op_check(ctx: ScenarioContext, exp: OpCheckExperiment, scale: float) -> Outcome:
    """Multiplier, subordination and Neumann-trace evaluations of H^s u, pairwise."""
    _require_spectral(ctx, "op-check")
    tol = exp.tolerance * scale
    rows = []
    for s in exp.orders or [ctx.cfg.s]:
        cfg = FracConfig(s=s)
        mult = frac_heat_multiplier(ctx.u, cfg)
        bala = frac_heat_balakrishnan(ctx.u, cfg)
        trace = neumann_trace(SpectralExtension(ctx.u, cfg, ctx.scenario.ygrid))
        neumann = trace.grid_limit.scaled(-1.0 / cfg.c_s)
        ratios = trace.mode_ratios
        rows.append(
            {
                "s": s,
                "multiplier_vs_balakrishnan": relative_l2(bala, mult),
                "multiplier_vs_neumann": relative_l2(neumann, mult),
                "balakrishnan_vs_neumann": relative_l2(neumann, bala),
                "neumann_constant_deviation": float(np.max(np.abs(ratios - 1.0))) if ratios.size else 0.0,
                "grid_discrepancy": trace.discrepancy,
            }
        )
    frame = pd.DataFrame(rows)
    worst = float(frame.drop(columns=["s", "grid_discrepancy"]).to_numpy().max())
    metrics = {"worst_relative_deviation": worst, "tolerance": tol, "orders": [row["s"] for row in rows]}
    return Outcome(_status(worst <= tol), metrics, {"": frame})


def run_extend_check(ctx: ScenarioContext, exp: ExtendCheckExperiment, scale: float) -> Outcome:
    """Extension residual order, plus boundary, Neumann and Poisson checks for spectral data."""
    tol = exp.tolerance * scale
    dim = ctx.grid.dim
    checks: List[Dict[str, Any]] = []
    box = Box(x_lo=[-0.5] * dim, x_hi=[0.5] * dim, y_lo=0.5, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)
    conv = residual_convergence(ctx.ext, box, h0=exp.residual_h_length)
    last_order = conv["order"][-1] if conv["order"] else float("nan")
    checks.append(
        {"check": "pde_residual_order", "value": 0.0 if conv["exact"] else last_order, "limit": ORDER_TARGET,
         "passed": _order_ok(conv, scale)}
    )
    frames: Dict[str, pd.DataFrame] = {
        "residual": pd.DataFrame({"h": conv["h"], "residual": conv["residual"]}),
    }
    metrics: Dict[str, Any] = {"residual": conv["residual"], "residual_exact": conv["exact"]}

    if isinstance(ctx.ext, SpectralExtension):
        ext = ctx.ext
        s = ctx.cfg.s
        bc = boundary_convergence(ext)
        exponent = bc["exponent"]
        checks.append(
            {"check": "boundary_exponent", "value": exponent, "limit": 2.0 * s,
             "passed": not math.isfinite(exponent) or abs(exponent - 2.0 * s) <= EXPONENT_TOLERANCE * scale}
        )
        trace = neumann_trace(ext)
        checks.append(
            {"check": "neumann_grid_discrepancy", "value": trace.discrepancy, "limit": tol,
             "passed": trace.discrepancy <= tol}
        )
        points = exp.eval_points or default_eval_points(dim)
        for representation in ("poisson", "operator"):
            report = poisson_check(ctx.u, ctx.cfg, points, representation, ext)
            checks.append(
                {"check": f"{representation}_representation", "value": report.max_relative_deviation,
                 "limit": tol, "passed": report.max_relative_deviation <= tol}
            )
        decay = neumann_decay_bound(ext)
        metrics.update({"neumann_decay_bound": decay["bound"], "neumann_decay_ratio": decay["ratio"]})

    frame = _checks_frame(checks)
    metrics["checks"] = {row["check"]: row["value"] for row in checks}
    return Outcome(_status(all(row["passed"] for row in checks)), metrics, {"": frame, **frames})


def _has_potential(ctx: ScenarioContext) -> bool:
    return ctx.potential is not None and not ctx.potential.is_zero


def run_frequency(ctx: ScenarioContext, exp: FrequencyExperiment, scale: float) -> Outcome:
    """Frequency curve, first variation, homogeneity and nondegeneracy checks."""
    tol = exp.tolerance * scale
    quad = ctx.scenario.quadrature
    U = ctx.ext
    adjusted_governs = _has_potential(ctx) or U.carries_flux
    options = CurveOptions(calibrate=exp.calibrate or adjusted_governs)
    curve = adjusted_frequency_curve(U, exp.radii_length, exp.C, quad, options=options)
    valid = np.array([flag == "ok" for flag in curve.flag])
    metrics: Dict[str, Any] = {
        "monotone": curve.monotone,
        "truncated": curve.truncated,
        "N_min": float(np.nanmin(curve.N)),
        "N_max": float(np.nanmax(curve.N)),
        "K1": curve.K1,
        "identity_gap": curve.identity_gap,
        "cs_core_min": curve.cs_core_min,
        "ck_monitor": curve.ck_monitor,
        "C": exp.C,
        "C_calibrated": curve.C_calibrated,
    }
    if adjusted_governs:
        monotone_ok = curve.monotone or curve.C_calibrated is not None
    else:
        monotone_ok = curve.monotone
    ok = monotone_ok and not curve.truncated

    r_mid = float(exp.radii_length[len(exp.radii_length) // 2])
    fv = first_variation_check(U, r_mid, exp.dr_length, quad)
    metrics["first_variation"] = {"r": r_mid, "order": fv["order"], "exact": fv["exact"]}
    ok = ok and _order_ok(fv, scale)

    kappa = ctx.kappa
    if kappa is not None and np.any(valid):
        deviation = float(np.max(np.abs(curve.N[valid] - kappa)))
        scaled = curve.H[valid] / curve.r[valid] ** (4.0 * kappa + ctx.cfg.a)
        spread = float(np.max(scaled) / np.min(scaled) - 1.0)
        metrics.update({"kappa": kappa, "kappa_deviation": deviation, "homogeneity_spread": spread})
        ok = ok and deviation <= tol and spread <= tol

    if np.any(valid):
        nd = nondegeneracy_check(curve, tolerance=tol)
        metrics["nondegeneracy"] = {"exponent": nd.exponent, "slack": nd.slack, "holds": nd.holds}
        ok = ok and nd.holds

    frames = {
        "": curve.to_frame(),
        "first-variation": pd.DataFrame({"dr": fv["dr"], "dH_fd": fv["dH_fd"], "residual": fv["residual"]}),
    }
    if exp.center_time is not None:
        rows = []
        for r in exp.radii_length:
            try:
                rows.append(centered_frequency(U, exp.center_time, r, quad))
            except DomainError as e:
                logger.debug(f"Skipping centered radius {r}: {e}")
        frames["centered"] = pd.DataFrame(rows, columns=["r", "h", "i", "n"])
        metrics["centered_radii"] = len(rows)
    return Outcome(_status(ok), metrics, frames)


def run_blowup(ctx: ScenarioContext, exp: BlowupExperiment, scale: float) -> Outcome:
    """Blow-up sequence, kappa fit and the rescaling identities."""
    tol = exp.tolerance * scale
    quad = ctx.scenario.quadrature
    report = blowup_sequence(ctx.ext, exp.radii_length, quad, exp.fit_count)
    r_min = float(min(exp.radii_length))
    transport = frequency_transport_check(ctx.ext, r_min, TRANSPORT_RHOS, quad)
    transport_gap = max(row["gap"] for row in transport["transport"])
    fit_gap = abs(report.kappa_hat - report.N_smallest)
    rescale_tol = RESCALING_TOLERANCE * scale
    metrics: Dict[str, Any] = {
        "kappa_hat": report.kappa_hat,
        "N_smallest": report.N_smallest,
        "fit_gap": fit_gap,
        "normalization_residual": report.normalization_residual,
        "transport_gap": transport_gap,
        "decaying": report.decaying,
    }
    ok = (
        fit_gap <= tol
        and report.normalization_residual <= rescale_tol
        and transport["normalization_residual"] <= rescale_tol
        and transport_gap <= rescale_tol
    )
    if exp.expected_kappa is not None:
        metrics["expected_kappa"] = exp.expected_kappa
        ok = ok and abs(report.kappa_hat - exp.expected_kappa) <= tol
    if _has_potential(ctx) and isinstance(ctx.ext, SpectralExtension):
        points = [[0.3] * ctx.grid.dim + [-0.5], [-0.2] * ctx.grid.dim + [-0.9]]
        neumann = rescaled_neumann_check(ctx.ext, r_min, points, quad)
        metrics["rescaled_neumann_deviation"] = neumann["max_relative_deviation"]
        ok = ok and neumann["max_relative_deviation"] <= rescale_tol
    frames = {"": report.to_frame(), "transport": pd.DataFrame(transport["transport"])}
    return Outcome(_status(ok), metrics, frames)


def run_harnack(ctx: ScenarioContext, exp: HarnackExperiment, scale: float) -> Outcome:
    """Harnack quotients on shrinking cylinders; reported, never asserted."""
    _require_spectral(ctx, "harnack")
    report = harnack_quotient(
        ctx.u,
        ctx.cfg.s,
        exp.radii_length,
        potential=ctx.potential,
        psi=exp.psi_value,
        points=exp.points,
        equation_tolerance=1e-6 * scale,
    )
    metrics = {
        "C_hat": report.C_hat,
        "spread": report.spread,
        "psi_norm": report.psi_norm,
        "equation_residual": report.equation_residual,
        "potential_shift": report.potential_shift,
    }
    return Outcome("report-only", metrics, {"": report.to_frame()})


def run_vanishing_order(ctx: ScenarioContext, exp: VanishingOrderExperiment, scale: float) -> Outcome:
    """Log-slope order of sup |u| over shrinking cylinders at one center."""
    center = exp.center_length or [0.0] * ctx.grid.dim
    target = ctx.u if ctx.u is not None else ctx.ext
    report = vanishing_order(target, center, exp.center_time, exp.radii_length, exp.points)
    metrics: Dict[str, Any] = {"order": None if report.infinite else report.order, "infinite": report.infinite}
    if exp.expected_infinite:
        status = _status(report.infinite)
    elif exp.expected_order is not None:
        metrics["expected_order"] = exp.expected_order
        finite = not report.infinite and math.isfinite(report.order)
        status = _status(finite and abs(report.order - exp.expected_order) <= exp.tolerance * scale)
    else:
        status = "report-only"
    return Outcome(status, metrics, {"": report.to_frame()})


def run_calibrate(ctx: ScenarioContext, exp: CalibrateExperiment, scale: float) -> Outcome:
    """Smallest C making the adjusted frequency nondecreasing on the sampled radii."""
    options = CurveOptions(calibrate=True, C_max=exp.C_max, monitor_ck=False)
    curve = adjusted_frequency_curve(ctx.ext, exp.radii_length, 0.0, ctx.scenario.quadrature, options=options)
    C = curve.C_calibrated
    frame = pd.DataFrame(
        {
            "r": curve.r,
            "N": curve.N,
            "psi": psi(curve.r, ctx.cfg.s),
            "adjusted": adjusted_quantity(curve.r, curve.N, C, ctx.cfg.s) if C is not None else np.nan,
        }
    )
    metrics = {"C": C, "C_max": exp.C_max, "truncated": curve.truncated}
    return Outcome(_status(C is not None and not curve.truncated), metrics, {"": frame})


Handler = Callable[[ScenarioContext, Any, float], Outcome]

HANDLERS: Dict[str, Handler] = {
    "op-check": run_op_check,
    "extend-check": run_extend_check,
    "frequency": run_frequency,
    "blowup": run_blowup,
    "harnack": run_harnack,
    "vanishing-order": run_vanishing_order,
    "calibrate-C": run_calibrate,
}


def handler_for(kind: str) -> Optional[Handler]:
    return HANDLERS.get(kind)
