import math

import numpy as np
import pytest

from src.lab.blowup import (
    ParabolicCylinder,
    ParabolicDilation,
    almgren_rescale,
    blowup_sequence,
    fit_kappa,
    frequency_transport_check,
    harnack_quotient,
    nondegeneracy_check,
    rescaled_neumann_check,
    vanishing_order,
)
from src.lab.errors import DomainError, PreconditionError, StructuralError
from src.lab.extension import extend
from src.lab.fields import SpaceTimeField
from src.lab.fracheat import FracConfig, manufactured_potential
from src.lab.frequency import adjusted_frequency_curve, height_average
from src.lab.solutions import LinearCombination, builtin_field


def test_dilation_group():
    d = ParabolicDilation(2.0)
    X, t = d.apply(np.array([1.0, -0.5]), np.array([-0.25]))
    np.testing.assert_allclose(X, [2.0, -1.0])
    np.testing.assert_allclose(t, [-1.0])
    assert d.compose(ParabolicDilation(0.25)).lam == pytest.approx(0.5)
    assert d.compose(d.inverse()).lam == pytest.approx(1.0)
    for lam in (0.0, -1.0):
        with pytest.raises(DomainError):
            ParabolicDilation(lam)


def test_cylinder_membership_and_sampling():
    cyl = ParabolicCylinder((0.0,), -0.5, 0.3)
    inside = cyl.contains(np.array([[0.1], [0.1], [0.4]]), np.array([-0.55, -0.3, -0.5]))
    assert inside.tolist() == [True, False, False]
    x, y, t = cyl.sample(5, half_ball=True)
    assert x.shape[0] == y.size == t.size
    assert np.all(y >= 0) and np.all(np.hypot(x[:, 0], y) <= 0.3 + 1e-12)
    assert t.min() == pytest.approx(-0.59) and t.max() == pytest.approx(-0.5)
    with pytest.raises(StructuralError):
        ParabolicCylinder((0.0,), 0.0, 0.0)


def test_rescaling_is_normalized(half, quad):
    U = builtin_field("x1", half)
    Ur = almgren_rescale(U, 0.4, quad)
    assert height_average(Ur, 1.0, quad) == pytest.approx(1.0, rel=1e-10)
    report = frequency_transport_check(U, 0.4, [0.5, 1.0], quad)
    assert report["normalization_residual"] <= 1e-10
    for row in report["transport"]:
        assert row["gap"] <= 1e-9
        assert row["N1_rescaled"] == pytest.approx(0.5, rel=1e-9)


def test_blowup_of_homogeneous_solution(half, quad):
    # poly2 is parabolically homogeneous, so every rescaling is the same field
    U = builtin_field("poly2", half)
    report = blowup_sequence(U, [0.8, 0.4, 0.2, 0.1], quad)
    assert report.kappa_hat == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(report.kappa_running[1:], 1.0, atol=1e-6)
    assert report.normalization_residual <= 1e-10
    assert np.all(report.distance[1:] <= 1e-6)
    assert report.decaying
    assert report.N_smallest == pytest.approx(1.0, abs=1e-6)
    assert list(report.to_frame().columns) == ["r", "distance", "H_norm", "kappa_running"]
    with pytest.raises(DomainError):
        blowup_sequence(U, [0.1, 0.2], quad)


def test_fit_kappa():
    r = np.array([0.1, 0.2, 0.4, 0.8])
    # slope 6 = 4 kappa + a
    assert fit_kappa(r, r**6, a=0.4) == pytest.approx(1.4)
    assert fit_kappa(r, r**6, a=0.4, count=2) == pytest.approx(1.4)
    assert math.isnan(fit_kappa(r[:1], r[:1] ** 6, a=0.0))


def test_vanishing_order_of_caloric_polynomial():
    # sup over Q_r of |x^2 + 2t| is 2 r^2, attained at x = 0, t = -r^2
    report = vanishing_order(lambda x, t: x[:, 0] ** 2 + 2.0 * t, [0.0], 0.0, [0.05, 0.1, 0.2])
    np.testing.assert_allclose(report.sup, 2.0 * report.r**2, rtol=1e-12)
    assert report.order == pytest.approx(2.0, rel=1e-10)
    assert not report.infinite
    assert len(report.to_frame()) == 3


def test_counterexample_orders(half):
    f = builtin_field("counterexample_f", half)
    at_origin = vanishing_order(f, [0.0], 0.0, [0.05, 0.1, 0.2])
    assert at_origin.order == pytest.approx(1.0, rel=1e-10)
    assert not at_origin.infinite
    below = vanishing_order(f, [0.0], -0.5, [0.1, 0.2, 0.3, 0.4])
    assert below.infinite
    assert below.order == math.inf


def test_vanishing_order_needs_two_radii():
    with pytest.raises(StructuralError):
        vanishing_order(lambda x, t: t, [0.0], 0.0, [0.1])


def test_vanishing_order_of_grid_field(shifted_cosine):
    report = vanishing_order(shifted_cosine, [0.0], 0.0, [0.1, 0.2])
    assert report.order == pytest.approx(0.0, abs=1e-2)
    with pytest.raises(StructuralError):
        vanishing_order(shifted_cosine, [0.0], 0.5, [0.1, 0.2])


def test_nondegeneracy_of_linear_field(half, quad):
    curve = adjusted_frequency_curve(builtin_field("x1", half), [0.1, 0.2, 0.4], quad=quad)
    report = nondegeneracy_check(curve)
    assert report.holds
    assert not report.interior_zero
    assert report.slack >= -1e-6
    with pytest.raises(DomainError):
        nondegeneracy_check(curve, r0=0.3)


def test_harnack_quotient(shifted_cosine, half):
    V = manufactured_potential(shifted_cosine, half)
    radii = [0.1, 0.2, 0.4]
    report = harnack_quotient(shifted_cosine, 0.5, radii, potential=V)
    assert report.equation_residual <= 1e-10
    # time independent: sup over B_r is 3, inf is 2 + cos r
    np.testing.assert_allclose(report.C_hat, 3.0 / (2.0 + np.cos(radii)), rtol=1e-10)
    assert math.isfinite(report.spread)
    assert len(report.to_frame()) == 3


def test_harnack_rejects_sign_changes_and_wrong_equations(grid, shifted_cosine, half):
    with pytest.raises(PreconditionError):
        harnack_quotient(SpaceTimeField.from_modes(grid, [((1,), 0, 0.5)]), 0.5, [0.1])
    with pytest.raises(PreconditionError):
        harnack_quotient(shifted_cosine, 0.5, [0.1])


def test_rescaled_neumann_condition(shifted_cosine, half):
    V = manufactured_potential(shifted_cosine, half)
    ext = extend(shifted_cosine, half, potential=V)
    report = rescaled_neumann_check(ext, 0.5, [[0.3, -0.5], [1.0, -1.0]])
    assert report["max_relative_deviation"] <= 1e-6
    with pytest.raises(PreconditionError):
        rescaled_neumann_check(extend(shifted_cosine, half), 0.5, [[0.3, -0.5]])
    with pytest.raises(StructuralError):
        rescaled_neumann_check(ext, 0.5, [[0.3]])


@pytest.mark.parametrize("name, s", [("one", 0.5), ("x1", 0.3), ("poly2", 0.5), ("y2s", 0.25)])
def test_nondegeneracy_of_builtin_fields(name, s, quad):
    curve = adjusted_frequency_curve(builtin_field(name, FracConfig(s=s)), [0.1, 0.2, 0.3, 0.4], quad=quad)
    report = nondegeneracy_check(curve)
    assert report.holds
    assert not report.interior_zero


def test_nondegeneracy_of_superposition(quad):
    cfg = FracConfig(s=0.5)
    U = LinearCombination([(1.0, builtin_field("x1", cfg)), (0.1, builtin_field("poly2", cfg))])
    report = nondegeneracy_check(adjusted_frequency_curve(U, [0.05, 0.1, 0.2, 0.4], quad=quad))
    assert report.holds
    assert report.slack >= 0.0


def test_harnack_psi_shift_keeps_the_pair_consistent(shifted_cosine, half):
    V = manufactured_potential(shifted_cosine, half)
    radii = [0.1, 0.2, 0.4]
    previous = None
    for psi0 in (0.0, 0.5, 2.0):
        report = harnack_quotient(shifted_cosine, 0.5, radii, potential=V, psi=psi0)
        assert report.equation_residual <= 1e-10
        # u >= 1 with c_s = 1, so the potential moves by at most psi0
        assert report.potential_shift == pytest.approx(psi0, rel=1e-12)
        expected = 3.0 / (2.0 + np.cos(radii) + np.array(radii) * psi0)
        np.testing.assert_allclose(report.C_hat, expected, rtol=1e-10)
        if previous is not None:
            assert np.all(report.C_hat <= previous)
        previous = report.C_hat


def test_harnack_psi_shift_without_potential(grid):
    one = SpaceTimeField.from_modes(grid, [((0,), 0, 1.0)])
    report = harnack_quotient(one, 0.5, [0.1, 0.4], psi=0.3)
    np.testing.assert_allclose(report.C_hat, 1.0 / (1.0 + 0.3 * np.array([0.1, 0.4])), rtol=1e-12)
    zero = SpaceTimeField.from_modes(grid, [((0,), 0, 0.0)])
    with pytest.raises(PreconditionError):
        harnack_quotient(zero, 0.5, [0.1], psi=0.3)
