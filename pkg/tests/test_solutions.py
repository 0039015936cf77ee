import numpy as np
import pytest

from src.lab.errors import ConfigError, DomainError, StructuralError
from src.lab.extension import Box, residual_convergence
from src.lab.fracheat import FracConfig
from src.lab.solutions import BUILTIN_FIELDS, LinearCombination, SymbolicField, builtin_field

rng = np.random.default_rng(11)
POINTS_X = rng.uniform(-1.0, 1.0, size=(20, 2))
POINTS_Y = rng.uniform(0.05, 1.5, size=20)
POINTS_T = rng.uniform(-2.0, -0.01, size=20)


@pytest.mark.parametrize(
    "name, dim, degree",
    [("one", 1, 0.0), ("x1", 1, 1.0), ("x1x2", 2, 2.0), ("poly2", 1, 2.0), ("poly2", 2, 2.0), ("y2s", 1, None)],
)
@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_builtins_are_parabolically_homogeneous(name, dim, degree, s):
    cfg = FracConfig(s=s)
    field = builtin_field(name, cfg, dim)
    degree = 2.0 * s if degree is None else degree
    assert 2.0 * field.kappa == pytest.approx(degree)
    residual = field.euler_residual(POINTS_X[:, :dim], POINTS_Y, POINTS_T, degree)
    np.testing.assert_allclose(residual, 0.0, atol=1e-12)


def test_counterexample_is_degree_one_and_flat():
    field = builtin_field("counterexample_f", FracConfig(s=0.5))
    assert field.kappa is None
    residual = field.euler_residual(POINTS_X[:, :1], POINTS_Y, POINTS_T, 1.0)
    np.testing.assert_allclose(residual, 0.0, atol=1e-12)
    flat = field.evaluate(np.array([[0.1], [0.0]]), np.array([1e-3, 0.0]), np.array([-0.5, -0.5]))
    assert np.all(flat.value == 0.0)


@pytest.mark.parametrize("s", [0.5])
def test_builtin_solutions_satisfy_the_extension_equation(s):
    cfg = FracConfig(s=s)
    box = Box(x_lo=[-0.5], x_hi=[0.5], y_lo=0.5, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)
    for name in ("one", "x1", "poly2"):
        report = residual_convergence(builtin_field(name, cfg), box)
        assert report["exact"], name


def test_weighted_extension_equation_for_y_power():
    # y^a d_y(y^{2s}) = 2s, so the residual is pure stencil error of second order
    box = Box(x_lo=[-0.5], x_hi=[0.5], y_lo=0.5, y_hi=1.0, t_lo=-2.0, t_hi=-1.0)
    report = residual_convergence(builtin_field("y2s", FracConfig(s=0.3)), box)
    assert report["order"][-1] == pytest.approx(2.0, abs=0.2)


def test_symbolic_field_matches_builtin():
    cfg = FracConfig(s=0.3)
    symbolic = SymbolicField("x1**2 + y**2 + 2*(2 + a)*t", cfg, kappa=1.0, y_smooth=True)
    builtin = builtin_field("poly2", cfg)
    x, y, t = POINTS_X[:, :1], POINTS_Y, POINTS_T
    a, b = symbolic.evaluate(x, y, t), builtin.evaluate(x, y, t)
    np.testing.assert_allclose(a.value, b.value, atol=1e-13)
    np.testing.assert_allclose(a.grad_x, b.grad_x, atol=1e-13)
    np.testing.assert_allclose(a.d_y, b.d_y, atol=1e-13)
    np.testing.assert_allclose(a.d_t, b.d_t, atol=1e-13)


def test_symbolic_constant_broadcasts():
    field = SymbolicField("3", FracConfig(s=0.5))
    sample = field.evaluate(POINTS_X[:5, :1], POINTS_Y[:5], POINTS_T[:5])
    np.testing.assert_array_equal(sample.value, 3.0)
    np.testing.assert_array_equal(sample.d_t, 0.0)


def test_symbolic_errors():
    cfg = FracConfig(s=0.5)
    with pytest.raises(ConfigError):
        SymbolicField("x1 + z", cfg)
    with pytest.raises(ConfigError):
        SymbolicField("x1 +", cfg)
    with pytest.raises(ConfigError):
        SymbolicField("x2", cfg, dim=1)


def test_builtin_registry():
    assert set(BUILTIN_FIELDS) == {"one", "x1", "x1x2", "y2s", "poly2", "counterexample_f"}
    with pytest.raises(DomainError):
        builtin_field("x3", FracConfig(s=0.5))
    with pytest.raises(StructuralError):
        builtin_field("x1x2", FracConfig(s=0.5), 1)


def test_linear_combination():
    cfg = FracConfig(s=0.5)
    combo = LinearCombination([(2.0, builtin_field("x1", cfg)), (-1.0, builtin_field("poly2", cfg))])
    x, y, t = POINTS_X[:, :1], POINTS_Y, POINTS_T
    expected = 2.0 * x[:, 0] - (x[:, 0] ** 2 + y**2 + 4.0 * t)
    np.testing.assert_allclose(combo.evaluate(x, y, t).value, expected, atol=1e-13)
    assert combo.kappa is None
    with pytest.raises(StructuralError):
        LinearCombination([(1.0, builtin_field("x1", cfg)), (1.0, builtin_field("x1", FracConfig(s=0.3)))])
