import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.lab.errors import DomainError, PreconditionError
from src.lab.fields import SpaceTimeField, heat_symbol
from src.lab.fracheat import (
    FracConfig,
    PotentialField,
    balakrishnan_scalar,
    frac_heat_balakrishnan,
    frac_heat_multiplier,
    fractional_power,
    manufactured_potential,
    parabolic_sobolev_norm,
    relative_l2,
)


def test_order_must_lie_in_unit_interval():
    for s in (0.0, 1.0, -0.2):
        with pytest.raises(ValidationError):
            FracConfig(s=s)
    cfg = FracConfig(s=0.25)
    assert cfg.a == pytest.approx(0.5)


def test_fractional_power_of_zero():
    out = fractional_power(np.array([0.0, 4.0, 1j]), 0.5)
    np.testing.assert_allclose(out, [0.0, 2.0, np.exp(0.25j * np.pi)], atol=1e-15)


def test_space_mode_is_an_eigenfunction(grid):
    # L = 1 for k = 1 on the 2 pi torus, so every power leaves cos x fixed
    u = SpaceTimeField.from_modes(grid, [((1,), 0, 0.5)])
    for s in (0.25, 0.5, 0.75):
        out = frac_heat_multiplier(u, FracConfig(s=s))
        np.testing.assert_allclose(out.samples, u.samples, atol=1e-13)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_time_mode_rotates_phase(grid, s):
    # H^s e^{it} = i^s e^{it}
    u = SpaceTimeField.from_modes(grid, [((0,), 1, 0.5)])
    _, t = grid.mesh()
    out = frac_heat_multiplier(u, FracConfig(s=s))
    np.testing.assert_allclose(out.samples.real, np.cos(t + 0.5 * math.pi * s), atol=1e-13)


def test_constants_are_annihilated(grid):
    u = SpaceTimeField.from_modes(grid, [((0,), 0, 3.0)])
    assert frac_heat_multiplier(u, FracConfig(s=0.4)).sup_norm() == 0.0


@pytest.mark.parametrize("lam", [1.0, 2.0 + 3.0j, 0.01 - 5.0j, 40.0j])
@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_subordination_scalar(lam, s):
    assert balakrishnan_scalar(lam, s) == pytest.approx(complex(lam) ** s, rel=1e-8)


def test_subordination_domain():
    assert balakrishnan_scalar(0.0, 0.5) == 0
    with pytest.raises(DomainError):
        balakrishnan_scalar(-1.0 + 0.5j, 0.5)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_two_operator_routes_agree(mixed_field, s):
    cfg = FracConfig(s=s)
    assert relative_l2(frac_heat_balakrishnan(mixed_field, cfg), frac_heat_multiplier(mixed_field, cfg)) <= 1e-8


def test_sobolev_norm_dominates_l2(mixed_field):
    assert parabolic_sobolev_norm(mixed_field, FracConfig(s=0.5)) >= mixed_field.l2_norm()


def test_manufactured_potential_closes_the_equation(shifted_cosine):
    cfg = FracConfig(s=0.5)
    V = manufactured_potential(shifted_cosine, cfg)
    xs, _ = shifted_cosine.grid.mesh()
    np.testing.assert_allclose(V.values, np.cos(xs[0]) / (2.0 + np.cos(xs[0])), atol=1e-12)
    assert V.K == pytest.approx(1.0)
    x = np.array([[0.4], [-1.3]])
    t = np.array([-0.2, -4.0])
    expected = np.cos(x[:, 0]) / (2.0 + np.cos(x[:, 0]))
    np.testing.assert_allclose(V.evaluate(x, t), expected, atol=1e-12)
    np.testing.assert_allclose(V.neumann_coefficient(x, t), cfg.c_s**2 * expected, atol=1e-12)
    lhs = frac_heat_multiplier(shifted_cosine, cfg)
    rhs = SpaceTimeField(shifted_cosine.grid, samples=cfg.c_s * V.values * shifted_cosine.samples)
    assert relative_l2(lhs, rhs) <= 1e-12


def test_manufactured_potential_needs_a_floor(grid):
    u = SpaceTimeField.from_modes(grid, [((1,), 0, 0.5)])
    with pytest.raises(PreconditionError) as excinfo:
        manufactured_potential(u, FracConfig(s=0.5))
    assert "x" in excinfo.value.location
    assert excinfo.value.location["value"] < 0.1


def test_rescaled_potential(shifted_cosine):
    cfg = FracConfig(s=0.5)
    V = manufactured_potential(shifted_cosine, cfg)
    scaled = V.rescaled(0.5).rescaled(0.5)
    x = np.array([[0.8]])
    t = np.array([-1.2])
    expected = 0.25 ** (2 * cfg.s) * V.neumann_coefficient(0.25 * x, 0.0625 * t)
    np.testing.assert_allclose(scaled.neumann_coefficient(x, t), expected, rtol=1e-14)


def test_zero_potential(grid):
    V = PotentialField.zero(grid, FracConfig(s=0.3))
    assert V.is_zero
    assert V.evaluate(np.array([[0.0]]), np.array([-1.0]))[0] == 0.0


def test_operator_is_linear(mixed_field, shifted_cosine):
    cfg = FracConfig(s=0.35)
    alpha, beta = 1.5 - 0.5j, -0.75
    combined = frac_heat_multiplier(mixed_field.scaled(alpha) + shifted_cosine.scaled(beta), cfg)
    separate = frac_heat_multiplier(mixed_field, cfg).scaled(alpha)
    separate = separate + frac_heat_multiplier(shifted_cosine, cfg).scaled(beta)
    assert relative_l2(combined, separate) <= 1e-13


@pytest.mark.parametrize("s1, s2", [(0.3, 0.4), (0.1, 0.85), (0.45, 0.45)])
def test_powers_compose(mixed_field, s1, s2):
    stacked = frac_heat_multiplier(frac_heat_multiplier(mixed_field, FracConfig(s=s1)), FracConfig(s=s2))
    direct = frac_heat_multiplier(mixed_field, FracConfig(s=s1 + s2))
    assert relative_l2(stacked, direct) <= 1e-10


def test_order_near_one_approaches_heat_operator(grid):
    # lambda = 1 + i for the (k, m) = (1, 1) mode
    u = SpaceTimeField.from_modes(grid, [((1,), 1, 0.5)])
    classical = u.with_spectrum(u.spectrum * heat_symbol(grid))
    assert relative_l2(frac_heat_multiplier(u, FracConfig(s=0.999)), classical) <= 1e-2
