"""Real Gamma, the principal root L(xi, sigma) and Macdonald functions of complex argument.

K_nu is computed from the integral representation

    K_nu(z) = int_0^inf cosh(nu u) exp(-z cosh u) du,    Re z > 0,

with a fixed trapezoidal rule. The integrand is analytic in the strip
|Im u| < pi/2 - |arg z|, so the rule converges geometrically for every z in
the sector |arg z| <= pi/4 used by the extension problem.
"""

import logging
import math
from typing import Sequence, Union

import numpy as np
from scipy import special

from .errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, Sequence[float], np.ndarray]

MAX_ORDER = 2.0
SECTOR_HALF_ANGLE = math.pi / 4
SMALL_Z = 1e-3
K_NODES = 400
# exp(-K_TAIL) bounds the neglected tail relative to the integrand peak
K_TAIL = 50.0
CHUNK = 2048


def gamma_reflect(x: float) -> float:
    """Gamma on the whole real line except the non-positive integers."""
    if x <= 0 and float(x).is_integer():
        raise DomainError(f"Gamma has a pole at x={x}")
    return float(special.gamma(x))


def gamma(x: float) -> float:
    """Gamma(x) for real x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return gamma_reflect(x)


def principal_L(xi: ArrayLike, sigma: float) -> complex:
    """Principal root of (2 pi |xi|)^2 + 2 pi i sigma for one frequency vector."""
    xi_norm = float(np.linalg.norm(np.atleast_1d(np.asarray(xi, dtype=float))))
    return complex(principal_L_grid(np.array(xi_norm), np.array(float(sigma))))


def principal_L_grid(xi_norm: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Vectorized principal_L over broadcastable arrays of |xi| and sigma."""
    lam = (2.0 * np.pi * np.asarray(xi_norm, dtype=float)) ** 2 + 2j * np.pi * np.asarray(
        sigma, dtype=float
    )
    return np.sqrt(lam)


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise DomainError(f"Bessel order must satisfy |nu| <= {MAX_ORDER}, got {nu}")
    return nu


def _check_sector(z: np.ndarray) -> None:
    if np.any(~np.isfinite(z)):
        raise DomainError("Macdonald argument must be finite")
    if np.any(z.real <= 0):
        raise DomainError("Macdonald argument must satisfy Re z > 0")
    if np.any(np.abs(np.angle(z)) > SECTOR_HALF_ANGLE + 1e-12):
        raise DomainError("Macdonald argument outside the sector |arg z| <= pi/4")


def _k_trapezoid(nu: float, z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape, dtype=complex)
    frac = np.arange(K_NODES + 1) / K_NODES
    weights = np.ones(K_NODES + 1)
    weights[0] = weights[-1] = 0.5
    for start in range(0, z.size, CHUNK):
        zc = z[start:start + CHUNK]
        u_max = np.arccosh(1.0 + K_TAIL / zc.real)
        u = u_max[:, None] * frac[None, :]
        integrand = np.cosh(nu * u) * np.exp(-zc[:, None] * np.cosh(u))
        out[start:start + CHUNK] = (integrand @ weights) * (u_max / K_NODES)
    return out


def _is_integer_order(nu: float) -> bool:
    return abs(nu - round(nu)) < 1e-12


def phi_series(nu: float, z: np.ndarray) -> np.ndarray:
    """z^nu K_nu(z) from the ascending series, for non-integer nu > 0 and small |z|."""
    nu = float(nu)
    if nu <= 0 or _is_integer_order(nu):
        raise DomainError(f"series branch needs non-integer nu > 0, got {nu}")
    z = np.asarray(z, dtype=complex)
    q = (z / 2.0) ** 2
    regular = np.zeros_like(z)
    singular = np.zeros_like(z)
    power = np.ones_like(z)
    for k in range(4):
        regular += power / (math.factorial(k) * gamma_reflect(k + 1 - nu))
        singular += power / (math.factorial(k) * gamma_reflect(k + 1 + nu))
        power = power * q
    z2nu = np.exp(2.0 * nu * np.log(np.where(z == 0, 1.0, z)))
    z2nu = np.where(z == 0, 0.0, z2nu)
    prefactor = math.pi / (2.0 * math.sin(math.pi * nu))
    return prefactor * (2.0**nu * regular - 2.0 ** (-nu) * z2nu * singular)


def macdonald_k(nu: float, z: ArrayLike) -> Union[complex, np.ndarray]:
    """Macdonald function K_nu(z) for |nu| <= 2 and z in the sector |arg z| <= pi/4."""
    nu = abs(_check_order(nu))
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    _check_sector(zz)

    result = np.empty(zz.shape, dtype=complex)
    small = np.abs(zz) < SMALL_Z
    if np.any(small) and nu > 0 and not _is_integer_order(nu):
        zs = zz[small]
        result[small] = phi_series(nu, zs) * np.exp(-nu * np.log(zs))
    else:
        small[:] = False
    if np.any(~small):
        result[~small] = _k_trapezoid(nu, zz[~small])

    if scalar:
        return complex(result[0])
    return result.reshape(np.shape(z))


def phi(nu: float, z: ArrayLike) -> Union[complex, np.ndarray]:
    """Phi_nu(z) = z^nu K_nu(z), extended to z = 0 by continuity for nu > 0."""
    nu = _check_order(nu)
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    result = np.empty(zz.shape, dtype=complex)

    zero = zz == 0
    if np.any(zero):
        if nu <= 0:
            raise DomainError(f"phi({nu}, 0) is unbounded; needs nu > 0")
        result[zero] = 2.0 ** (nu - 1.0) * gamma(nu)

    rest = ~zero
    if np.any(rest):
        zr = zz[rest]
        _check_sector(zr)
        small = np.abs(zr) < SMALL_Z
        values = np.empty(zr.shape, dtype=complex)
        if nu > 0 and not _is_integer_order(nu) and np.any(small):
            values[small] = phi_series(nu, zr[small])
        else:
            small[:] = False
        if np.any(~small):
            zl = zr[~small]
            values[~small] = np.exp(nu * np.log(zl)) * _k_trapezoid(abs(nu), zl)
        result[rest] = values

    if scalar:
        return complex(result[0])
    return result.reshape(np.shape(z))


def phi_prime(nu: float, z: ArrayLike) -> Union[complex, np.ndarray]:
    """Derivative Phi_nu'(z) = -z^nu K_{1-nu}(z)."""
    nu = _check_order(nu)
    zz = np.asarray(z, dtype=complex)
    k = macdonald_k(1.0 - nu, zz)
    return -np.exp(nu * np.log(zz)) * k


def neumann_constant(s: float) -> float:
    """c_s = Gamma(1-s) / (2^{2s-1} Gamma(s))."""
    return gamma(1.0 - s) / (2.0 ** (2.0 * s - 1.0) * gamma(s))
