import numpy as np
import pytest
from pydantic import ValidationError

from src.lab.errors import DomainError, StructuralError
from src.lab.extension import (
    Box,
    YGrid,
    boundary_convergence,
    extend,
    neumann_decay_bound,
    neumann_trace,
    pde_residual,
    poisson_check,
    poisson_kernel_mass,
    residual_convergence,
)
from src.lab.fields import SpaceTimeField
from src.lab.fracheat import FracConfig, frac_heat_multiplier, manufactured_potential, relative_l2
from src.lab.solutions import builtin_field

INNER_BOX = Box(x_lo=[-0.5], x_hi=[0.5], y_lo=0.5, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)


def test_half_order_extension_in_closed_form(shifted_cosine, half):
    # Phi_{1/2}(z) = sqrt(pi/2) exp(-z), so U = 2 + exp(-y) cos x
    ext = extend(shifted_cosine, half)
    x = np.array([[0.3], [-1.1], [2.0]])
    y = np.array([0.0, 0.4, 2.5])
    t = np.array([-0.5, -1.0, -3.0])
    sample = ext.evaluate(x, y, t)
    np.testing.assert_allclose(sample.value, 2.0 + np.exp(-y) * np.cos(x[:, 0]), atol=1e-11)
    np.testing.assert_allclose(sample.grad_x[:, 0], -np.exp(-y) * np.sin(x[:, 0]), atol=1e-11)
    np.testing.assert_allclose(sample.d_t, 0.0, atol=1e-13)
    np.testing.assert_allclose(sample.d_y[1:], -np.exp(-y[1:]) * np.cos(x[1:, 0]), atol=1e-10)
    np.testing.assert_allclose(ext.weighted_flux(x, y, t), -np.exp(-y) * np.cos(x[:, 0]), atol=1e-10)


def test_trace_is_the_boundary_datum(mixed_field):
    ext = extend(mixed_field, FracConfig(s=0.3))
    xs, t = mixed_field.grid.mesh()
    x = xs[0].ravel()[:64, None]
    tt = t.ravel()[:64]
    np.testing.assert_allclose(ext.trace(x, tt), mixed_field.samples.real.ravel()[:64], atol=1e-12)


def test_slice_matches_pointwise(mixed_field):
    ext = extend(mixed_field, FracConfig(s=0.7))
    x = np.array([[0.2], [-0.9]])
    y = np.array([0.1, 0.6, 1.5])
    sl = ext.evaluate_slice(x, y, -1.3)
    point = ext.evaluate(np.repeat(x, 3, axis=0), np.tile(y, 2), np.full(6, -1.3))
    np.testing.assert_allclose(sl.value.ravel(), point.value, atol=1e-13)
    np.testing.assert_allclose(sl.d_y.ravel(), point.d_y, atol=1e-11)


@pytest.mark.parametrize("s", [0.25, 0.5])
def test_boundary_convergence_rate(shifted_cosine, s):
    report = boundary_convergence(extend(shifted_cosine, FracConfig(s=s)))
    assert report["expected"] == pytest.approx(2 * s)
    assert report["exponent"] == pytest.approx(2 * s, abs=0.05)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_neumann_trace_recovers_the_operator(mixed_field, s):
    cfg = FracConfig(s=s)
    trace = neumann_trace(extend(mixed_field, cfg))
    assert relative_l2(trace.operator, frac_heat_multiplier(mixed_field, cfg)) <= 1e-10
    assert trace.discrepancy <= 1e-4
    np.testing.assert_allclose(trace.mode_ratios, 1.0, atol=1e-4)


def test_pde_residual_is_second_order(shifted_cosine, half):
    report = residual_convergence(extend(shifted_cosine, half), INNER_BOX)
    assert not report["exact"]
    assert report["order"][-1] == pytest.approx(2.0, abs=0.2)


def test_polynomial_solution_has_exact_residual(half):
    report = residual_convergence(builtin_field("poly2", half), INNER_BOX)
    assert report["exact"]


def test_residual_region_checks(shifted_cosine, half):
    ext = extend(shifted_cosine, half)
    low = Box(x_lo=[-0.5], x_hi=[0.5], y_lo=1e-4, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)
    with pytest.raises(StructuralError):
        pde_residual(ext, low)
    late = Box(x_lo=[-0.5], x_hi=[0.5], y_lo=0.5, y_hi=1.0, t_lo=-1.0, t_hi=0.0)
    with pytest.raises(StructuralError):
        pde_residual(ext, late)
    with pytest.raises(ValidationError):
        Box(x_lo=[1.0], x_hi=[0.0], y_lo=0.5, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)


@pytest.mark.parametrize("representation", ["poisson", "operator"])
def test_integral_representations(grid, representation):
    # 2 + cos x + 0.3 cos(x + t) stays above 0.7, so relative deviations are meaningful
    u = SpaceTimeField.from_modes(grid, [((0,), 0, 2.0), ((1,), 0, 0.5), ((1,), 1, 0.15)])
    points = [[0.3, 0.5, -1.0], [-1.0, 1.5, -0.5], [2.0, 0.2, -4.0]]
    report = poisson_check(u, FracConfig(s=0.4), points, representation)
    assert report.representation == representation
    assert report.max_relative_deviation <= 1e-6


def test_integral_representation_domain(mixed_field):
    cfg = FracConfig(s=0.4)
    with pytest.raises(DomainError):
        poisson_check(mixed_field, cfg, [[0.0, 5.0, -1.0]])
    with pytest.raises(StructuralError):
        poisson_check(mixed_field, cfg, [[0.0, 0.5]])
    with pytest.raises(DomainError):
        poisson_check(mixed_field, cfg, [[0.0, 0.5, -1.0]], "fourier")


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_poisson_kernel_has_unit_mass(s):
    assert poisson_kernel_mass(FracConfig(s=s), 0.7) == pytest.approx(1.0, rel=1e-8)


def test_decay_bound_ratio(shifted_cosine, half):
    V = manufactured_potential(shifted_cosine, half)
    report = neumann_decay_bound(extend(shifted_cosine, half, potential=V))
    # |U_y| = exp(-y) |cos x| <= 1 at s = 1/2
    assert report["bound"] == pytest.approx(1.0, abs=1e-3)
    assert report["ratio"] == pytest.approx(1.0 / 3.0, abs=1e-3)


def test_ygrid_validation():
    assert YGrid().nodes()[0] == pytest.approx(1e-4)
    assert YGrid().nodes()[-1] == pytest.approx(12.0)
    with pytest.raises(ValidationError):
        YGrid(points=8, stencil=10)
