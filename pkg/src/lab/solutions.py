"""Closed-form extension fields: exact homogeneous solutions and test fixtures.

Each builtin carries kappa, the frequency value N(r) it must produce (its parabolic
homogeneity degree is 2 kappa), and a certificate stating why it solves
y^a U_t = div(y^a grad U) with zero weighted Neumann datum.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .errors import ConfigError, DomainError, StructuralError
from .extension import ExtensionField, FieldSample
from .fracheat import FracConfig

logger = logging.getLogger(__name__)


class SyntheticField(ExtensionField):
    """Base for closed-form evaluators."""

    name = "synthetic"

    def __init__(self, cfg: FracConfig, dim: int = 1):
        if dim not in (1, 2):
            raise StructuralError(f"dimension must be 1 or 2, got {dim}")
        self.cfg = cfg
        self.dim = dim
        self.potential = None

    def __repr__(self) -> str:
        return f"<{type(self).__name__}(dim={self.dim}, s={self.cfg.s}, kappa={self.kappa})>"

    @staticmethod
    def _points(x: np.ndarray, y: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.atleast_2d(np.asarray(x, dtype=float)),
            np.atleast_1d(np.asarray(y, dtype=float)),
            np.atleast_1d(np.asarray(t, dtype=float)),
        )


class ConstantField(SyntheticField):
    name = "one"
    kappa = 0.0
    certificate = "U = 1: every derivative vanishes; Z U = 0"

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        value = np.ones(y.shape)
        if not derivatives:
            return FieldSample(value)
        return FieldSample(value, np.zeros(x.shape), np.zeros(y.shape), np.zeros(y.shape))


class LinearField(SyntheticField):
    name = "x1"
    kappa = 0.5
    certificate = "U = x1: harmonic in x, independent of y and t; Z U = U"

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        value = x[:, 0].copy()
        if not derivatives:
            return FieldSample(value)
        grad = np.zeros(x.shape)
        grad[:, 0] = 1.0
        return FieldSample(value, grad, np.zeros(y.shape), np.zeros(y.shape))


class ProductField(SyntheticField):
    name = "x1x2"
    kappa = 1.0
    certificate = "U = x1 x2 (n = 2): harmonic in x, independent of y and t; Z U = 2 U"

    def __init__(self, cfg: FracConfig, dim: int = 2):
        if dim != 2:
            raise StructuralError("x1x2 needs dim = 2")
        super().__init__(cfg, dim)

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        value = x[:, 0] * x[:, 1]
        if not derivatives:
            return FieldSample(value)
        grad = np.stack([x[:, 1], x[:, 0]], axis=1)
        return FieldSample(value, grad, np.zeros(y.shape), np.zeros(y.shape))


class YPowerField(SyntheticField):
    name = "y2s"
    y_smooth = False

    def __init__(self, cfg: FracConfig, dim: int = 1):
        super().__init__(cfg, dim)
        self.kappa = cfg.s
        self.certificate = "U = y^{2s}: y^a U_y = 2s is constant, so div(y^a grad U) = 0 = y^a U_t; Z U = 2s U"

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        two_s = 2.0 * self.cfg.s
        value = y**two_s
        if not derivatives:
            return FieldSample(value)
        with np.errstate(divide="ignore"):
            d_y = np.where(y > 0, two_s * y ** (two_s - 1.0), np.inf if two_s < 1 else 0.0)
        return FieldSample(value, np.zeros(x.shape), d_y, np.zeros(y.shape))


class QuadraticField(SyntheticField):
    name = "poly2"
    kappa = 1.0

    def __init__(self, cfg: FracConfig, dim: int = 1):
        super().__init__(cfg, dim)
        self.rate = 2.0 * (dim + 1.0 + cfg.a)
        self.certificate = (
            f"U = |x|^2 + y^2 + {self.rate:g} t: div(y^a grad U) = 2(n + 1 + a) y^a = y^a U_t; "
            "y^a U_y = 2 y^{1+a} -> 0; Z U = 2 U"
        )

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        value = np.sum(x**2, axis=1) + y**2 + self.rate * t
        if not derivatives:
            return FieldSample(value)
        return FieldSample(value, 2.0 * x, 2.0 * y, np.full(y.shape, self.rate))


class CounterexampleField(SyntheticField):
    """f = y exp(-(|x|^2 + |t|) / y^2): homogeneous of degree 1, flat on {y = 0, t < 0}.

    Not a solution of the extension problem; used by the vanishing-order estimator.
    """

    name = "counterexample_f"
    kappa = None
    y_smooth = False
    certificate = "fixture only: parabolically homogeneous of degree 1, vanishes to infinite order at (x, 0, t), t < 0"

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        q = np.sum(x**2, axis=1) + np.abs(t)
        positive = y > 0
        ys = np.where(positive, y, 1.0)
        expo = np.where(positive, np.exp(-q / ys**2), 0.0)
        value = np.where(positive, y * expo, 0.0)
        if not derivatives:
            return FieldSample(value)
        grad = np.where(positive[:, None], -2.0 * x / ys[:, None] * expo[:, None], 0.0)
        d_y = np.where(positive, expo * (1.0 + 2.0 * q / ys**2), 0.0)
        d_t = np.where(positive, -np.sign(t) / ys * expo, 0.0)
        return FieldSample(value, grad, d_y, d_t)


class LinearCombination(ExtensionField):
    """sum_k c_k U_k of fields sharing dim and order."""

    def __init__(self, terms: Sequence[Tuple[float, ExtensionField]]):
        if not terms:
            raise StructuralError("empty linear combination")
        dims = {field.dim for _, field in terms}
        orders = {field.cfg.s for _, field in terms}
        if len(dims) != 1 or len(orders) != 1:
            raise StructuralError("combined fields must share dim and s")
        self.terms = [(float(c), field) for c, field in terms]
        self.dim = dims.pop()
        self.cfg = terms[0][1].cfg
        self.y_smooth = all(field.y_smooth for _, field in terms)
        kappas = {field.kappa for _, field in terms}
        self.kappa = kappas.pop() if len(kappas) == 1 else None
        self.potential = None
        self.certificate = " + ".join(f"{c:g}*[{getattr(f, 'name', type(f).__name__)}]" for c, f in self.terms)

    def __repr__(self) -> str:
        return f"<LinearCombination({self.certificate})>"

    def bounds(self) -> Optional[Dict[str, float]]:
        windows = [field.bounds() for _, field in self.terms if field.bounds() is not None]
        if not windows:
            return None
        return {
            "x_half": min(w["x_half"] for w in windows),
            "t_window": min(w["t_window"] for w in windows),
        }

    def _combine(self, parts: List[FieldSample], derivatives: bool) -> FieldSample:
        total: Optional[FieldSample] = None
        for (c, _), part in zip(self.terms, parts):
            if total is None:
                total = FieldSample(
                    c * part.value,
                    None if part.grad_x is None else c * part.grad_x,
                    None if part.d_y is None else c * part.d_y,
                    None if part.d_t is None else c * part.d_t,
                )
                continue
            total.value = total.value + c * part.value
            if derivatives:
                total.grad_x = total.grad_x + c * part.grad_x
                total.d_y = total.d_y + c * part.d_y
                total.d_t = total.d_t + c * part.d_t
        return total

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        return self._combine([f.evaluate(x, y, t, derivatives) for _, f in self.terms], derivatives)

    def evaluate_slice(self, x: np.ndarray, y: np.ndarray, t: float, derivatives: bool = True) -> FieldSample:
        return self._combine([f.evaluate_slice(x, y, t, derivatives) for _, f in self.terms], derivatives)


class SymbolicField(SyntheticField):
    """Closed-form U(x1[, x2], y, t) given as a sympy expression; s and a may appear as symbols."""

    name = "expression"

    def __init__(
        self,
        expression: str,
        cfg: FracConfig,
        dim: int = 1,
        kappa: Optional[float] = None,
        y_smooth: bool = False,
    ):
        super().__init__(cfg, dim)
        names = [f"x{i + 1}" for i in range(dim)] + ["y", "t"]
        symbols = sp.symbols(names, real=True)
        local = {name: sym for name, sym in zip(names, symbols)}
        local.update({"s": sp.Float(cfg.s), "a": sp.Float(cfg.a)})
        try:
            expr = sp.sympify(expression, locals=local)
        except (sp.SympifyError, TypeError, SyntaxError) as e:
            raise ConfigError(f"cannot parse field expression {expression!r}", [str(e)]) from e
        unknown = expr.free_symbols - set(symbols)
        if unknown:
            raise ConfigError(
                f"field expression uses unknown symbols {sorted(str(u) for u in unknown)}",
                [f"allowed: {', '.join(names)}, s, a"],
            )
        self.expression = expr
        self.kappa = kappa
        self.y_smooth = y_smooth
        self.certificate = f"U = {sp.sstr(expr)} (user expression)"
        self._value = sp.lambdify(symbols, expr, "numpy")
        self._grad = [sp.lambdify(symbols, sp.diff(expr, sym), "numpy") for sym in symbols[:dim]]
        self._d_y = sp.lambdify(symbols, sp.diff(expr, symbols[dim]), "numpy")
        self._d_t = sp.lambdify(symbols, sp.diff(expr, symbols[dim + 1]), "numpy")
        logger.info(f"Compiled symbolic field {self.certificate}")

    @staticmethod
    def _call(fn: Callable[..., np.ndarray], args: List[np.ndarray], size: int) -> np.ndarray:
        out = np.asarray(fn(*args), dtype=float)
        return np.broadcast_to(out, (size,)).astype(float)

    def evaluate(self, x: np.ndarray, y: np.ndarray, t: np.ndarray, derivatives: bool = True) -> FieldSample:
        x, y, t = self._points(x, y, t)
        args = [x[:, i] for i in range(self.dim)] + [y, t]
        size = y.size
        value = self._call(self._value, args, size)
        if not derivatives:
            return FieldSample(value)
        grad = np.stack([self._call(g, args, size) for g in self._grad], axis=1)
        return FieldSample(value, grad, self._call(self._d_y, args, size), self._call(self._d_t, args, size))


BUILTIN_FIELDS: Dict[str, Callable[[FracConfig, int], SyntheticField]] = {
    "one": ConstantField,
    "x1": LinearField,
    "x1x2": ProductField,
    "y2s": YPowerField,
    "poly2": QuadraticField,
    "counterexample_f": CounterexampleField,
}


def builtin_field(name: str, cfg: FracConfig, dim: int = 1) -> SyntheticField:
    """Instantiate a builtin closed-form field by name."""
    try:
        factory = BUILTIN_FIELDS[name]
    except KeyError:
        raise DomainError(f"unknown builtin field {name!r}; choose from {sorted(BUILTIN_FIELDS)}")
    return factory(cfg, dim)
