import numpy as np
import pytest

from flamefront.spectral import Grid, RealField, derivative


def make_band_limited(grid, kmax, seed, taper=0.5):
    """Random real field with Hermitian spectrum decaying like exp(-taper*p)."""
    rng = np.random.default_rng(seed)
    c = np.zeros(grid.N, dtype=complex)
    for p in range(1, kmax + 1):
        z = (rng.standard_normal() + 1j * rng.standard_normal()) * np.exp(-taper * p)
        c[p] = z
        c[-p] = np.conj(z)
    values = np.fft.ifft(c * grid.N).real
    return RealField(grid, values)


def make_smooth_graph(grid, kmax, max_slope, seed, taper=0.5):
    """Band-limited field rescaled so max |y_x| equals max_slope."""
    f = make_band_limited(grid, kmax, seed, taper)
    slope = np.abs(derivative(f, 1).values).max()
    return RealField(grid, f.values * max_slope / slope)


def naive_dft_coefficients(field):
    """Direct O(N^2) Fourier-series coefficients, the transform oracle."""
    grid = field.grid
    n = grid.N
    coeffs = np.zeros(n, dtype=complex)
    for idx, p in enumerate(grid.modes):
        coeffs[idx] = np.sum(field.values * np.exp(-1j * grid.k[idx] * grid.x)) / n
    return coeffs


def l2_relative(a, b):
    """Relative L2 error of arrays a vs reference b."""
    return float(np.sqrt(np.sum((a - b) ** 2) / np.sum(b**2)))


@pytest.fixture
def grid64():
    return Grid(2 * np.pi, 64)


@pytest.fixture
def grid128():
    return Grid(2 * np.pi, 128)
