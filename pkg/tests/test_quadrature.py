import math

import numpy as np
import pytest
from scipy import special

from src.lab.errors import DomainError
from src.lab.quadrature import (
    exp_sinh_ray,
    half_range_exp_sinh,
    half_range_gauss,
    hermite_tensor,
    tanh_sinh_unit,
)
from src.lab.reduction import stable_sum, weighted_sum


def half_moment(a: float, k: float) -> float:
    return 0.5 * special.gamma(0.5 * (a + k + 1.0))


@pytest.mark.parametrize("a", [-0.5, 0.0, 0.4])
def test_half_range_gauss_moments(a):
    y, w = half_range_gauss(a, 20)
    assert np.all(y > 0)
    for k in (0, 2, 4):
        assert stable_sum(w * y**k) == pytest.approx(half_moment(a, k), rel=1e-11)


@pytest.mark.parametrize("a", [-0.6, 0.0, 0.5])
def test_exp_sinh_handles_fractional_powers(a):
    y, w = half_range_exp_sinh(a)
    assert stable_sum(w) == pytest.approx(half_moment(a, 0), rel=1e-10)
    # squared gradient of y^{2s}: y^{-2a}
    p = -2.0 * a
    assert stable_sum(w * y**p) == pytest.approx(half_moment(a, p), rel=1e-9)


def test_weight_exponent_range():
    with pytest.raises(DomainError):
        half_range_gauss(1.0, 10)
    with pytest.raises(DomainError):
        half_range_exp_sinh(-1.0)


def test_tanh_sinh_on_unit_interval():
    tau, w = tanh_sinh_unit()
    assert np.all((tau > 0) & (tau < 1))
    assert stable_sum(w * tau**2) == pytest.approx(1.0 / 3.0, rel=1e-10)
    assert stable_sum(w / np.sqrt(tau)) == pytest.approx(2.0, rel=1e-8)


def test_hermite_tensor_moments():
    nodes, w = hermite_tensor(20, 2)
    assert nodes.shape == (400, 2)
    assert stable_sum(w) == pytest.approx(math.pi, rel=1e-13)
    assert stable_sum(w * nodes[:, 0] ** 2 * nodes[:, 1] ** 2) == pytest.approx(math.pi / 4, rel=1e-12)


def test_exp_sinh_ray_integrates_decay():
    rho, w = exp_sinh_ray()
    assert stable_sum(w * np.exp(-rho)) == pytest.approx(1.0, rel=1e-10)
    assert stable_sum(w * rho**-0.5 * np.exp(-rho)) == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_compensated_sum_is_exact():
    assert stable_sum(np.array([1e16, 1.0, -1e16])) == 1.0
    assert stable_sum(np.array([1e16 + 1j, 1.0, -1e16 - 1j])) == 1.0 + 0j
    assert weighted_sum(np.array([0.5, 0.25]), np.array([2.0, 4.0])) == 2.0


def test_sum_independent_of_order():
    rng = np.random.default_rng(3)
    values = rng.normal(size=1000) * 10.0 ** rng.integers(-8, 8, size=1000)
    assert stable_sum(values) == stable_sum(values[::-1])
