"""Fixed quadrature rules for the Gaussian-weighted functionals.

All rules are tabulated once per parameter set and returned as (nodes, weights)
arrays. Weighted rules fold their weight function into the weights.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_genlaguerre, roots_hermite

from .errors import DomainError

logger = logging.getLogger(__name__)

Rule = Tuple[np.ndarray, np.ndarray]


@lru_cache(maxsize=32)
def half_range_gauss(a: float, n: int) -> Rule:
    """n-point rule for int_0^inf y^a exp(-y^2) f(y) dy, exact for f polynomial in y^2.

    With v = y^2 the weight becomes v^alpha exp(-v) / 2, alpha = (a - 1)/2: a
    generalized Gauss-Laguerre rule in v.
    """
    if not -1.0 < a < 1.0:
        raise DomainError(f"weight exponent must lie in (-1, 1), got {a}")
    v, w = roots_genlaguerre(n, 0.5 * (a - 1.0))
    return np.sqrt(v), 0.5 * w


@lru_cache(maxsize=32)
def half_range_exp_sinh(a: float, step: float = 1.0 / 32.0, upper: float = 1.4) -> Rule:
    """Exp-sinh rule y = exp(pi/2 sinh u) for int_0^inf y^a exp(-y^2) f(y) dy.

    Handles f with fractional powers of y at the origin, including gradients that
    blow up like y^{-a}. The lower cut is chosen so that y^{1-|a|} has dropped
    below 1e-17 there.
    """
    if not -1.0 < a < 1.0:
        raise DomainError(f"weight exponent must lie in (-1, 1), got {a}")
    lower = -math.asinh(2.0 * 40.0 / (math.pi * (1.0 - abs(a))))
    u = np.arange(math.floor(lower / step), math.ceil(upper / step) + 1) * step
    y = np.exp(0.5 * math.pi * np.sinh(u))
    jac = 0.5 * math.pi * np.cosh(u) * y
    weights = step * jac * y**a * np.exp(-(y**2))
    keep = weights > 0
    return y[keep], weights[keep]


@lru_cache(maxsize=16)
def tanh_sinh_unit(step: float = 0.1, span: float = 3.6) -> Rule:
    """Tanh-sinh rule on (0, 1) in logistic form tau = 1 / (1 + exp(-pi sinh u))."""
    u = np.arange(-round(span / step), round(span / step) + 1) * step
    z = math.pi * np.sinh(u)
    tau = 1.0 / (1.0 + np.exp(-z))
    one_minus = 1.0 / (1.0 + np.exp(z))
    weights = step * math.pi * np.cosh(u) * tau * one_minus
    keep = (tau > 0) & (one_minus > 0) & (weights > 0)
    return tau[keep], weights[keep]


@lru_cache(maxsize=16)
def hermite_rule(n: int, truncation: float = 10.0) -> Rule:
    """Gauss-Hermite rule for weight exp(-x^2), nodes beyond |x| > truncation dropped."""
    x, w = roots_hermite(n)
    keep = np.abs(x) <= truncation
    return x[keep], w[keep]


def hermite_tensor(n: int, dim: int, truncation: float = 10.0) -> Rule:
    """Tensor Hermite rule in dim variables: nodes (P, dim), weights (P,)."""
    x, w = hermite_rule(n, truncation)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return nodes, weights


def exp_sinh_ray(step: float = 1.0 / 16.0, lower: float = -5.0, upper: float = 4.0) -> Rule:
    """Exp-sinh nodes rho = exp(pi/2 sinh u) on (0, inf) with plain Jacobian weights."""
    u = np.arange(round(lower / step), round(upper / step) + 1) * step
    rho = np.exp(0.5 * math.pi * np.sinh(u))
    weights = step * 0.5 * math.pi * np.cosh(u) * rho
    return rho, weights
