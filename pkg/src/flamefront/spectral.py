"""Periodic grids, Fourier transforms, and spectral operators.

Fields live on an equispaced periodic grid over [0, L).  Spectral
coefficients are true Fourier-series coefficients: the forward transform
carries the 1/N factor, so ``f(x_j) = sum_p c_p exp(i k_p x_j)`` with
``k_p = 2*pi*p/L`` and Parseval reads ``integral |f|^2 dx = L * sum |c_p|^2``.

Conventions:

- Coefficients are stored in FFT order (p = 0, 1, ..., N/2-1, -N/2, ..., -1).
- The unpaired -N/2 (Nyquist) mode is kept real for real fields and its
  multiplier is zeroed in odd-order derivatives, so derivatives of real
  fields stay real.
- The mollifier is the sharp Fourier cutoff keeping modes with
  ``|k| <= 1/delta`` (ties kept), which makes it an exact projection.
- Nonlinear terms should be evaluated on a refined grid: ``refine`` and
  ``restrict`` implement exact zero-padded interpolation and its adjoint
  truncation (the Nyquist coefficient is split on the way up and folded
  back on the way down, so refine -> restrict is the identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "GridMismatchError",
    "forward_transform",
    "inverse_transform",
    "derivative",
    "fractional_derivative",
    "mollify",
    "mollifier_mask",
    "sobolev_norm",
    "l2_inner",
    "pointwise_apply",
    "apply_symbol",
    "refine",
    "restrict",
    "zero_field",
    "constant_field",
    "field_from_modes",
    "field_from_coefficients",
]

MAX_DERIVATIVE_ORDER = 8


class GridMismatchError(ValueError):
    """Raised when an operation combines fields on different grids."""


@dataclass(frozen=True)
class Grid:
    """Equispaced periodic grid on [0, L) with N points.

    Attributes
    ----------
    L : float
        Domain length (> 0).
    N : int
        Number of sample points; must be even and >= 8.
    h : float
        Grid spacing L/N.
    x : ndarray
        Sample locations x_j = j*h.
    k : ndarray
        Angular wavenumbers 2*pi*p/L in FFT order.
    """

    L: float
    N: int
    h: float = field(init=False, repr=False, compare=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)
    modes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"grid length must be positive, got {self.L}")
        if self.N % 2 != 0 or self.N < 8:
            raise ValueError(f"grid size must be even and >= 8, got {self.N}")
        object.__setattr__(self, "h", self.L / self.N)
        x = self.h * np.arange(self.N)
        # FFT-ordered mode numbers 0..N/2-1, -N/2..-1, built exactly
        p = np.concatenate(
            [np.arange(0, self.N // 2), np.arange(-self.N // 2, 0)]
        ).astype(np.float64)
        k = (2.0 * np.pi / self.L) * p
        for name, arr in (("x", x), ("k", k), ("modes", p.astype(np.int64))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def nyquist(self) -> int:
        """Index of the unpaired -N/2 mode in FFT order."""
        return self.N // 2

    def refined(self, factor: int) -> "Grid":
        return Grid(self.L, self.N * factor)


@dataclass(frozen=True, eq=False)
class RealField:
    """N real samples of a periodic function on a grid.

    The Fourier coefficients are computed on demand and cached (fields are
    immutable), so chains of spectral operators compose exactly instead of
    accumulating transform round-trip noise.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.N,):
            raise ValueError(
                f"field has {values.shape} samples, grid expects ({self.grid.N},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spectrum", None)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier-series coefficients c_p in FFT order, 1/N-normalized."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (self.grid.N,):
            raise ValueError(
                f"spectrum has {coeffs.shape} modes, grid expects ({self.grid.N},)"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("spectral coefficients must be finite")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)


def _require_same_grid(*fields: RealField) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(
                f"fields on different grids: (L={grid.L}, N={grid.N}) vs "
                f"(L={f.grid.L}, N={f.grid.N})"
            )
    return grid


def _coefficients(f: RealField) -> np.ndarray:
    """Cached Fourier coefficients of a field (Nyquist forced real)."""
    cached = f._spectrum
    if cached is None:
        cached = np.fft.fft(f.values) / f.grid.N
        cached[f.grid.nyquist] = cached[f.grid.nyquist].real
        cached.setflags(write=False)
        object.__setattr__(f, "_spectrum", cached)
    return cached


def _to_values(grid: Grid, coefficients: np.ndarray) -> np.ndarray:
    return np.fft.ifft(coefficients * grid.N).real


def field_from_coefficients(grid: Grid, coefficients: np.ndarray) -> RealField:
    """Real field with the given (Hermitian) spectrum attached exactly."""
    c = np.asarray(coefficients, dtype=np.complex128).copy()
    c[grid.nyquist] = c[grid.nyquist].real
    out = RealField(grid, _to_values(grid, c))
    c.setflags(write=False)
    object.__setattr__(out, "_spectrum", c)
    return out


def forward_transform(f: RealField) -> SpectralField:
    """Fourier coefficients of a real field, Nyquist mode forced real."""
    return SpectralField(f.grid, _coefficients(f))


def inverse_transform(f: SpectralField) -> RealField:
    """Samples sum_p c_p exp(i k_p x_j); the imaginary residue is dropped."""
    return field_from_coefficients(f.grid, f.coefficients)


def derivative_symbol(grid: Grid, order: int) -> np.ndarray:
    """Per-mode multiplier (i k)^order with the Nyquist zeroed for odd order."""
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(
            f"derivative order must be between 0 and {MAX_DERIVATIVE_ORDER}, got {order}"
        )
    mult = (1j * grid.k) ** order
    if order % 2 == 1:
        mult = mult.copy()
        mult[grid.nyquist] = 0.0
    return mult


def derivative(f: RealField, order: int) -> RealField:
    """order-th spectral derivative; exact on resolved trig polynomials."""
    if order == 0:
        return f
    c = _coefficients(f) * derivative_symbol(f.grid, order)
    return field_from_coefficients(f.grid, c)


def fractional_derivative(f: RealField, s: float) -> RealField:
    """Fractional derivative with spectral multiplier |k|^s (s >= 0)."""
    if s < 0:
        raise ValueError(f"fractional order must be nonnegative, got {s}")
    if s == 0:
        return f
    c = _coefficients(f) * np.abs(f.grid.k) ** s
    return field_from_coefficients(f.grid, c)


def mollifier_mask(grid: Grid, delta: float) -> np.ndarray:
    """Boolean mask of modes kept by the sharp cutoff |k| <= 1/delta."""
    if not delta > 0:
        raise ValueError(f"mollification scale must be positive, got {delta}")
    return np.abs(grid.k) <= 1.0 / delta


def mollify(f: RealField, delta: float) -> RealField:
    """Sharp Fourier truncation zeroing modes with |k| > 1/delta."""
    mask = mollifier_mask(f.grid, delta)
    if mask.all():
        return f
    return field_from_coefficients(f.grid, _coefficients(f) * mask)


def sobolev_norm(f: RealField, s: float = 0.0) -> float:
    """H^s norm (L * sum (1 + k^2)^s |c_p|^2)^(1/2); s=0 is the L2 norm."""
    if s < 0:
        raise ValueError(f"Sobolev order must be nonnegative, got {s}")
    c = _coefficients(f)
    weights = (1.0 + f.grid.k**2) ** s
    return float(np.sqrt(f.grid.L * np.sum(weights * np.abs(c) ** 2)))


def l2_inner(f: RealField, g: RealField) -> float:
    """L2 inner product by the (exact for band-limited) periodic trapezoid."""
    grid = _require_same_grid(f, g)
    return float(grid.h * np.dot(f.values, g.values))


def pointwise_apply(
    fields: RealField | Sequence[RealField],
    func: Callable[..., np.ndarray],
) -> RealField:
    """Apply a sample-wise map to one or more fields on a common grid.

    The map is evaluated on the fields' own grid; callers needing aliasing
    control should refine first (see module docstring).
    """
    if isinstance(fields, RealField):
        fields = (fields,)
    grid = _require_same_grid(*fields)
    out = np.asarray(func(*(f.values for f in fields)), dtype=np.float64)
    if out.shape != (grid.N,):
        raise ValueError(f"pointwise map returned shape {out.shape}, expected ({grid.N},)")
    return RealField(grid, out)


def apply_symbol(f: RealField, symbol: np.ndarray) -> RealField:
    """Multiply the spectrum by a per-mode symbol and transform back."""
    if symbol.shape != (f.grid.N,):
        raise ValueError("symbol length must match the grid")
    return field_from_coefficients(f.grid, _coefficients(f) * symbol)


def pad_coefficients(c: np.ndarray, factor: int) -> np.ndarray:
    """Zero-pad a coefficient array to factor*N modes, splitting the Nyquist."""
    n = c.shape[0]
    m = n * factor
    half = n // 2
    if factor == 1:
        return c.copy()
    out = np.zeros(m, dtype=np.complex128)
    out[:half] = c[:half]
    out[m - half + 1 :] = c[half + 1 :]
    out[half] = 0.5 * c[half]
    out[m - half] = 0.5 * np.conj(c[half])
    return out


def truncate_coefficients(d: np.ndarray, n: int) -> np.ndarray:
    """Keep modes |p| <= n/2 of a finer spectrum, folding +-n/2 together."""
    m = d.shape[0]
    if m < n:
        raise ValueError("cannot truncate to more modes than available")
    half = n // 2
    if m == n:
        return d.copy()
    out = np.zeros(n, dtype=np.complex128)
    out[:half] = d[:half]
    out[half + 1 :] = d[m - half + 1 :]
    out[half] = d[half] + d[m - half]
    return out


def refine(f: RealField, factor: int = 2) -> RealField:
    """Exact spectral interpolation onto a factor-times finer grid."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    if factor == 1:
        return f
    fine = f.grid.refined(factor)
    return field_from_coefficients(fine, pad_coefficients(_coefficients(f), factor))


def restrict(f: RealField, grid: Grid) -> RealField:
    """Project a finer-grid field onto the resolved modes of a coarser grid."""
    if f.grid.L != grid.L:
        raise GridMismatchError("restriction requires matching domain lengths")
    if f.grid.N % grid.N != 0:
        raise ValueError("fine grid size must be a multiple of the coarse size")
    if f.grid.N == grid.N:
        return f
    return field_from_coefficients(grid, truncate_coefficients(_coefficients(f), grid.N))


def zero_field(grid: Grid) -> RealField:
    return RealField(grid, np.zeros(grid.N))


def constant_field(grid: Grid, value: float) -> RealField:
    return RealField(grid, np.full(grid.N, float(value)))


def field_from_modes(
    grid: Grid, modes: Iterable[tuple[int, float, float]]
) -> RealField:
    """Build sum_m amplitude * sin(2*pi*p*x/L + phase) from (p, amplitude, phase)."""
    values = np.zeros(grid.N)
    for p, amplitude, phase in modes:
        values += amplitude * np.sin(2.0 * np.pi * p * grid.x / grid.L + phase)
    return RealField(grid, values)
