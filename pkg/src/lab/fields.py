"""Periodic space-time grids, band-limited fields and their Fourier calculus.

Layout: samples are stored with shape (Nx,)*n + (Nt,), axis order (x1[, x2], t).
Space nodes are x_j = -Lx/2 + j*Lx/Nx, time nodes t_l = -T + l*T/Nt, so the
time window is [-T, 0). Spectra use numpy's FFT order on every axis, with
xi_k = k/Lx and sigma_m = m/T for the signed integers k, m of fftfreq. The
forward transform carries no prefactor and a space phase (-1)^k, so that a
spectrum entry is the coefficient of exp(2 pi i (<xi, x> + sigma t)) in
physical coordinates; the inverse carries 1/(Nx^n Nt).
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import fft as sfft

from .errors import DomainError, StructuralError
from .reduction import stable_sum

logger = logging.getLogger(__name__)

EVAL_CHUNK = 4096


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


class SpaceTimeGrid(BaseModel):
    """Uniform periodic grid on [-Lx/2, Lx/2)^n x [-T, 0)."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(default=1, ge=1, le=2)
    x_period_length: float = Field(default=2 * np.pi, gt=0)
    x_points: int = Field(default=64, ge=8)
    t_window_time: float = Field(default=2 * np.pi, gt=0)
    t_points: int = Field(default=64, ge=8)

    @field_validator("x_points", "t_points")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if not _is_power_of_two(value):
            raise ValueError(f"grid point counts must be powers of two, got {value}")
        return value

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.x_points,) * self.dim + (self.t_points,)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def dx(self) -> float:
        return self.x_period_length / self.x_points

    @property
    def dt(self) -> float:
        return self.t_window_time / self.t_points

    @property
    def cell_measure(self) -> float:
        return self.dx**self.dim * self.dt

    def x_nodes(self) -> np.ndarray:
        return -0.5 * self.x_period_length + self.dx * np.arange(self.x_points)

    def t_nodes(self) -> np.ndarray:
        return -self.t_window_time + self.dt * np.arange(self.t_points)

    def xi_axis(self) -> np.ndarray:
        return sfft.fftfreq(self.x_points, d=self.dx)

    def sigma_axis(self) -> np.ndarray:
        return sfft.fftfreq(self.t_points, d=self.dt)

    def mesh(self) -> Tuple[List[np.ndarray], np.ndarray]:
        """Broadcast physical coordinates: ([x1, x2...], t), each of full grid shape."""
        axes = [self.x_nodes()] * self.dim + [self.t_nodes()]
        grids = np.meshgrid(*axes, indexing="ij")
        return list(grids[:-1]), grids[-1]

    def frequency_mesh(self) -> Tuple[List[np.ndarray], np.ndarray]:
        """Broadcast frequencies: ([xi1, xi2...], sigma) in FFT order."""
        axes = [self.xi_axis()] * self.dim + [self.sigma_axis()]
        grids = np.meshgrid(*axes, indexing="ij")
        return list(grids[:-1]), grids[-1]

    def xi_norm_mesh(self) -> np.ndarray:
        xis, _ = self.frequency_mesh()
        return np.sqrt(sum(x**2 for x in xis))

    def integer_mesh(self) -> Tuple[List[np.ndarray], np.ndarray]:
        """Signed integer mode indices (k per space axis, m in time)."""
        axes = [np.rint(sfft.fftfreq(self.x_points) * self.x_points)] * self.dim
        axes.append(np.rint(sfft.fftfreq(self.t_points) * self.t_points))
        grids = np.meshgrid(*axes, indexing="ij")
        return list(grids[:-1]), grids[-1]

    def space_phase(self) -> np.ndarray:
        """(-1)^(k1 + ... + kn) on the spectral grid."""
        ks, _ = self.integer_mesh()
        return np.where(sum(ks) % 2 == 0, 1.0, -1.0)

    def inner_half_mask(self) -> np.ndarray:
        """True on modes with |k| < Nx/4 per axis and |m| < Nt/4."""
        ks, m = self.integer_mesh()
        mask = np.abs(m) < self.t_points / 4
        for k in ks:
            mask &= np.abs(k) < self.x_points / 4
        return mask

    def contains_time(self, t: float) -> bool:
        return -self.t_window_time <= t <= 0.0

    def contains_space(self, x: np.ndarray) -> bool:
        half = 0.5 * self.x_period_length
        return bool(np.all(np.abs(np.asarray(x)) <= half))


@dataclass(frozen=True)
class ModeSet:
    """Nonzero modes of a field: physical frequencies and coefficients (spectrum / N)."""

    xi: np.ndarray  # (M, n)
    sigma: np.ndarray  # (M,)
    coeff: np.ndarray  # (M,)

    @property
    def count(self) -> int:
        return int(self.coeff.size)

    @property
    def xi_norm(self) -> np.ndarray:
        return np.linalg.norm(self.xi, axis=1)

    def synthesize(
        self,
        x: np.ndarray,
        t: np.ndarray,
        weights: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """Sum_j w_j coeff_j exp(2 pi i (<xi_j, x> + sigma_j t)) at P points.

        weights may be None, shape (M,), or shape (P, M) for point-dependent factors.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if x.shape[1] != self.xi.shape[1]:
            raise StructuralError(f"points have dim {x.shape[1]}, modes have dim {self.xi.shape[1]}")
        out = np.empty(x.shape[0], dtype=complex)
        coeff: Optional[np.ndarray] = self.coeff
        if weights is not None:
            coeff = self.coeff * weights if np.ndim(weights) == 1 else None
        for start in range(0, x.shape[0], EVAL_CHUNK):
            stop = start + EVAL_CHUNK
            phase = np.exp(
                2j * np.pi * (x[start:stop] @ self.xi.T + np.outer(t[start:stop], self.sigma))
            )
            if coeff is not None:
                out[start:stop] = phase @ coeff
            else:
                out[start:stop] = np.sum(phase * (self.coeff * weights[start:stop]), axis=1)
        return out


class SpaceTimeField:
    """Samples of u(x, t) on a SpaceTimeGrid with a lazily synchronized spectrum."""

    def __init__(
        self,
        grid: SpaceTimeGrid,
        samples: Optional[np.ndarray] = None,
        spectrum: Optional[np.ndarray] = None,
    ):
        if (samples is None) == (spectrum is None):
            raise StructuralError("SpaceTimeField needs exactly one of samples or spectrum")
        self.grid = grid
        self._samples: Optional[np.ndarray] = None
        self._spectrum: Optional[np.ndarray] = None
        if samples is not None:
            self._samples = self._checked(samples, "samples")
        else:
            self._spectrum = self._checked(spectrum, "spectrum")

    def _checked(self, values: np.ndarray, what: str) -> np.ndarray:
        arr = np.array(values, dtype=complex)
        if arr.shape != self.grid.shape:
            raise StructuralError(f"{what} shape {arr.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise StructuralError(f"{what} contain non-finite values")
        arr.setflags(write=False)
        return arr

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            values = dft_inverse_array(self._spectrum, self.grid)
            values.setflags(write=False)
            self._samples = values
        return self._samples

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            values = dft_forward_array(self._samples, self.grid)
            values.setflags(write=False)
            self._spectrum = values
        return self._spectrum

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.samples.imag)) <= 1e-12 * max(1.0, np.max(np.abs(self.samples))))

    def with_spectrum(self, spectrum: np.ndarray) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, spectrum=spectrum)

    def l2_norm(self) -> float:
        return float(np.sqrt(stable_sum(np.abs(self.samples) ** 2) * self.grid.cell_measure))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def active_modes(self, rel_tol: float = 1e-13) -> ModeSet:
        spec = self.spectrum
        peak = np.max(np.abs(spec))
        xis, sigma = self.grid.frequency_mesh()
        if peak == 0:
            mask = np.zeros(spec.shape, dtype=bool)
        else:
            mask = np.abs(spec) > rel_tol * peak
        xi = np.stack([x[mask] for x in xis], axis=1) if np.any(mask) else np.zeros((0, self.grid.dim))
        return ModeSet(xi=xi, sigma=sigma[mask], coeff=spec[mask] / self.grid.size)

    def evaluate(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Trigonometric interpolant at arbitrary points; x has shape (P, n)."""
        return self.active_modes().synthesize(x, t)

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        _same_grid(self, other)
        return SpaceTimeField(self.grid, samples=self.samples + other.samples)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        _same_grid(self, other)
        return SpaceTimeField(self.grid, samples=self.samples - other.samples)

    def scaled(self, factor: complex) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, samples=factor * self.samples)

    def __repr__(self) -> str:
        return f"<SpaceTimeField(shape={self.grid.shape}, Lx={self.grid.x_period_length}, T={self.grid.t_window_time})>"

    @classmethod
    def from_function(
        cls, grid: SpaceTimeGrid, func: Callable[..., np.ndarray]
    ) -> "SpaceTimeField":
        """Sample func(x1[, x2], t) on the grid."""
        xs, t = grid.mesh()
        return cls(grid, samples=np.broadcast_to(func(*xs, t), grid.shape))

    @classmethod
    def from_modes(
        cls,
        grid: SpaceTimeGrid,
        modes: Iterable[Tuple[Sequence[int], int, complex]],
        real: bool = True,
    ) -> "SpaceTimeField":
        """Build u = sum amp * exp(2 pi i (<k/Lx, x> + m t / T)) from integer modes.

        With real=True every nonzero mode gets its complex conjugate partner and the
        zero mode keeps only its real part.
        """
        spectrum = np.zeros(grid.shape, dtype=complex)
        for k, m, amp in modes:
            k = tuple(int(v) for v in np.atleast_1d(k))
            if len(k) != grid.dim:
                raise StructuralError(f"mode {k} does not match grid dim {grid.dim}")
            idx = _mode_index(grid, k, int(m))
            if real:
                conj = _mode_index(grid, tuple(-v for v in k), -int(m))
                if conj == idx:
                    spectrum[idx] += complex(amp).real * grid.size
                    continue
                spectrum[conj] += np.conj(amp) * grid.size
            spectrum[idx] += amp * grid.size
        return cls(grid, spectrum=spectrum)

    @classmethod
    def random_band_limited(
        cls,
        grid: SpaceTimeGrid,
        n_modes: int,
        max_k: int,
        max_m: int,
        seed: int,
        real: bool = True,
    ) -> "SpaceTimeField":
        """Seeded random field supported on |k| <= max_k, |m| <= max_m."""
        rng = np.random.default_rng(seed)
        modes = []
        for _ in range(n_modes):
            k = tuple(int(v) for v in rng.integers(-max_k, max_k + 1, size=grid.dim))
            m = int(rng.integers(-max_m, max_m + 1))
            amp = complex(rng.normal(), rng.normal()) / np.sqrt(2.0)
            modes.append((k, m, amp))
        return cls.from_modes(grid, modes, real=real)


def _mode_index(grid: SpaceTimeGrid, k: Tuple[int, ...], m: int) -> Tuple[int, ...]:
    return tuple(v % grid.x_points for v in k) + (m % grid.t_points,)


def _same_grid(a: SpaceTimeField, b: SpaceTimeField) -> None:
    if a.grid != b.grid:
        raise StructuralError("fields live on different grids")


def dft_forward_array(samples: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    if samples.shape != grid.shape:
        raise StructuralError(f"samples shape {samples.shape} does not match grid {grid.shape}")
    return sfft.fftn(samples) * grid.space_phase()


def dft_inverse_array(spectrum: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    if spectrum.shape != grid.shape:
        raise StructuralError(f"spectrum shape {spectrum.shape} does not match grid {grid.shape}")
    return sfft.ifftn(spectrum * grid.space_phase())


def dft_forward(field: SpaceTimeField) -> np.ndarray:
    """Spectrum of a field (no prefactor)."""
    return dft_forward_array(np.asarray(field.samples), field.grid)


def dft_inverse(spectrum: np.ndarray, grid: SpaceTimeGrid) -> SpaceTimeField:
    """Field whose spectrum is the given array."""
    return SpaceTimeField(grid, samples=dft_inverse_array(np.asarray(spectrum), grid))


def spectral_support_ok(field: SpaceTimeField, rel_tol: float = 1e-12) -> bool:
    spec = np.abs(field.spectrum)
    peak = np.max(spec)
    if peak == 0:
        return True
    outside = spec[~field.grid.inner_half_mask()]
    return bool(outside.size == 0 or np.max(outside) <= rel_tol * peak)


def warn_if_aliased(field: SpaceTimeField, operation: str) -> bool:
    ok = spectral_support_ok(field)
    if not ok:
        logger.warning(f"{operation}: spectrum reaches beyond the inner half of the mode range")
    return ok


def time_shift(field: SpaceTimeField, h: float) -> SpaceTimeField:
    """Lambda_h u(x, t) = u(x, t + h), applied spectrally."""
    if h == 0:
        return field
    _, sigma = field.grid.frequency_mesh()
    return field.with_spectrum(field.spectrum * np.exp(2j * np.pi * sigma * h))


def heat_symbol(grid: SpaceTimeGrid) -> np.ndarray:
    """lambda(xi, sigma) = (2 pi |xi|)^2 + 2 pi i sigma on the spectral grid."""
    _, sigma = grid.frequency_mesh()
    return (2.0 * np.pi * grid.xi_norm_mesh()) ** 2 + 2j * np.pi * sigma


def heat_semigroup(field: SpaceTimeField, tau: float) -> SpaceTimeField:
    """exp(-tau H) u by its Fourier multiplier."""
    if tau < 0:
        raise DomainError(f"heat semigroup needs tau >= 0, got {tau}")
    if tau == 0:
        return field
    warn_if_aliased(field, "heat_semigroup")
    return field.with_spectrum(field.spectrum * np.exp(-tau * heat_symbol(field.grid)))


def periodic_gaussian(grid: SpaceTimeGrid, tau: float, images: int = 6) -> np.ndarray:
    """Periodized space heat kernel G(., tau) sampled at the grid offsets, FFT order per axis."""
    offsets = np.rint(sfft.fftfreq(grid.x_points) * grid.x_points) * grid.dx
    shifts = grid.x_period_length * np.arange(-images, images + 1)
    d = offsets[:, None] + shifts[None, :]
    g1 = np.sum(np.exp(-(d**2) / (4.0 * tau)), axis=1) / np.sqrt(4.0 * np.pi * tau)
    kernel = g1
    for _ in range(grid.dim - 1):
        kernel = np.multiply.outer(kernel, g1)
    return kernel


def heat_semigroup_convolution(field: SpaceTimeField, tau: float) -> SpaceTimeField:
    """exp(-tau H) u(x, t) = int G(x - z, tau) u(z, t - tau) dz on the torus."""
    if tau < 0:
        raise DomainError(f"heat semigroup needs tau >= 0, got {tau}")
    if tau == 0:
        return field
    delayed = time_shift(field, -tau).samples
    kernel = periodic_gaussian(field.grid, tau) * field.grid.dx**field.grid.dim
    axes = tuple(range(field.grid.dim))
    kernel_hat = sfft.fftn(kernel, axes=axes)
    conv = sfft.ifftn(sfft.fftn(delayed, axes=axes) * kernel_hat[..., None], axes=axes)
    return SpaceTimeField(field.grid, samples=conv)
