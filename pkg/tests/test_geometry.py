import numpy as np
import pytest

from flamefront.geometry import (
    curvature,
    curvature_bundle,
    curvature_dx,
    curvature_dxx,
    curvature_ss,
    graph_velocity,
    normal_velocity,
)
from flamefront.spectral import (
    Grid,
    RealField,
    constant_field,
    derivative,
    refine,
    zero_field,
)

from conftest import make_smooth_graph


def arclength_kappa_ss_oracle(y, oversample=4):
    """Finite-difference d^2 kappa / ds^2 along the arclength parameter.

    The curve is sampled densely (exact trigonometric interpolation), the
    arclength between neighboring samples is accumulated by trapezoid
    quadrature of sqrt(1 + y_x^2), and kappa is differenced twice on the
    nonuniform s-grid with the periodic three-point stencil.  Oversampling
    keeps the stencil truncation error well below the comparison tolerance.
    """
    fine = refine(y, oversample)
    grid = fine.grid
    y_x = derivative(fine, 1).values
    speed = np.sqrt(1.0 + y_x**2)
    wrapped = np.append(speed, speed[0])
    # ds[j] = arclength from sample j to sample j+1 (periodic)
    ds = 0.5 * grid.h * (wrapped[1:] + wrapped[:-1])
    kappa = curvature(fine).values
    n = grid.N
    jm = np.arange(-1, n - 1)
    jp = np.arange(1, n + 1) % n
    ds_m = ds[jm]
    ds_p = ds[np.arange(n)]
    fine_kss = 2.0 * (
        kappa[jm] / (ds_m * (ds_m + ds_p))
        - kappa / (ds_m * ds_p)
        + kappa[jp] / (ds_p * (ds_m + ds_p))
    )
    return fine_kss[::oversample]


class TestCurvature:
    def test_constant_graph_is_flat(self, grid128):
        assert np.abs(curvature(constant_field(grid128, 3.0)).values).max() == 0.0

    def test_zero_graph_is_flat(self, grid128):
        assert np.abs(curvature(zero_field(grid128)).values).max() == 0.0

    def test_sine_at_crest(self, grid128):
        # at x = pi/2: y_x = 0, y_xx = -1, so kappa = -1
        y = RealField(grid128, np.sin(grid128.x))
        crest = grid128.N // 4
        assert curvature(y).values[crest] == pytest.approx(-1.0, abs=1e-10)


class TestCurvatureDx:
    def test_flat(self, grid128):
        assert np.abs(curvature_dx(zero_field(grid128)).values).max() == 0.0

    def test_matches_spectral_derivative_of_curvature(self):
        grid = Grid(2 * np.pi, 256)
        for seed in range(4):
            y = make_smooth_graph(grid, 6, 0.6, seed=seed)
            closed = curvature_dx(y).values
            spectral = derivative(curvature(y), 1).values
            rel = np.abs(closed - spectral).max() / np.abs(spectral).max()
            assert rel < 1e-8

    def test_sine_at_crest(self, grid128):
        y = RealField(grid128, np.sin(grid128.x))
        assert abs(curvature_dx(y).values[grid128.N // 4]) < 1e-9


class TestCurvatureDxx:
    def test_flat(self, grid128):
        assert np.abs(curvature_dxx(zero_field(grid128)).values).max() == 0.0

    def test_matches_spectral_second_derivative(self):
        grid = Grid(2 * np.pi, 256)
        for seed in range(4):
            y = make_smooth_graph(grid, 6, 0.6, seed=seed + 10)
            closed = curvature_dxx(y).values
            spectral = derivative(curvature(y), 2).values
            rel = np.abs(closed - spectral).max() / np.abs(spectral).max()
            assert rel < 1e-7

    def test_sine_at_crest(self, grid128):
        # hand evaluation: y_xxxx = 1, y_x = 0, y_xx = -1 gives 1 - 3(-1)^3 = 4
        y = RealField(grid128, np.sin(grid128.x))
        assert curvature_dxx(y).values[grid128.N // 4] == pytest.approx(4.0, abs=1e-8)


class TestCurvatureSs:
    def test_constant(self, grid128):
        assert np.abs(curvature_ss(constant_field(grid128, 1.5)).values).max() == 0.0

    def test_matches_arclength_oracle(self):
        grid = Grid(2 * np.pi, 512)
        y = RealField(grid, np.sin(grid.x))
        closed = curvature_ss(y).values
        oracle = arclength_kappa_ss_oracle(y)
        rel = np.abs(closed - oracle).max() / np.abs(closed).max()
        assert rel < 1e-4

    def test_sine_at_crest(self, grid128):
        # (1/(1+0)) * 4 - 0 = 4, combining the crest values above
        y = RealField(grid128, np.sin(grid128.x))
        assert curvature_ss(y).values[grid128.N // 4] == pytest.approx(4.0, abs=1e-8)

    def test_bundle_identity(self):
        # kappa_ss = kappa_xx/(1+y_x^2) - y_x y_xx kappa_x/(1+y_x^2)^2 nodewise
        grid = Grid(2 * np.pi, 256)
        y = make_smooth_graph(grid, 6, 0.8, seed=21)
        b = curvature_bundle(y)
        y_x = derivative(y, 1).values
        y_xx = derivative(y, 2).values
        q = 1.0 + y_x**2
        combo = b.kappa_xx.values / q - y_x * y_xx * b.kappa_x.values / q**2
        rel = np.abs(b.kappa_ss.values - combo).max() / np.abs(combo).max()
        assert rel < 1e-12


class TestParity:
    def test_even_graph_even_curvature_odd_slope(self, grid128):
        # cos(x) is even about the x = 0 grid point
        y = RealField(grid128, np.cos(grid128.x))
        k = curvature(y).values
        k_x = curvature_dx(y).values
        n = grid128.N
        for j in range(1, n // 2):
            assert abs(k[j] - k[n - j]) < 1e-10
            assert abs(k_x[j] + k_x[n - j]) < 1e-10


class TestNormalVelocity:
    def test_flat_front_unit_speed(self, grid128):
        for law in ("full", "simplified"):
            for alpha in (0.5, 1.0, 2.0):
                vn = normal_velocity(zero_field(grid128), alpha, law)
                assert np.abs(vn.values - 1.0).max() == 0.0

    def test_full_law_alpha_one_coefficients(self, grid128):
        # alpha = 1 coefficients on (1, k, k^2, k^3, k_ss) are 1, 0, 3/2, 20/3, 4;
        # at the sine crest kappa = -1, kappa_ss = 4: 1 + 3/2 - 20/3 + 16 = 71/6
        y = RealField(grid128, np.sin(grid128.x))
        vn = normal_velocity(y, 1.0, "full")
        assert vn.values[grid128.N // 4] == pytest.approx(71.0 / 6.0, abs=1e-8)

    def test_simplified_law_at_crest(self, grid128):
        # 1 + (alpha-1)(-1) + 4*4 = 18 - alpha
        y = RealField(grid128, np.sin(grid128.x))
        for alpha in (0.7, 1.0, 1.3):
            vn = normal_velocity(y, alpha, "simplified")
            assert vn.values[grid128.N // 4] == pytest.approx(18.0 - alpha, abs=1e-8)

    def test_rejects_unknown_law(self, grid128):
        with pytest.raises(ValueError):
            normal_velocity(zero_field(grid128), 1.0, "quadratic")


class TestGraphVelocity:
    def test_flat_front_translates_down(self, grid128):
        y = zero_field(grid128)
        vn = constant_field(grid128, 1.0)
        assert np.abs(graph_velocity(y, vn).values + 1.0).max() == 0.0

    def test_zero_speed(self, grid128):
        y = make_smooth_graph(grid128, 5, 0.5, seed=30)
        out = graph_velocity(y, zero_field(grid128))
        assert np.abs(out.values).max() == 0.0

    def test_algebraic_inversion(self, grid128):
        y = make_smooth_graph(grid128, 5, 0.7, seed=31)
        vn = make_smooth_graph(grid128, 4, 0.5, seed=32)
        y_t = graph_velocity(y, vn)
        y_x = derivative(y, 1).values
        recovered = -y_t.values / np.sqrt(1.0 + y_x**2)
        assert np.abs(recovered - vn.values).max() < 1e-12

    def test_composition_on_constant(self, grid128):
        for law in ("full", "simplified"):
            for alpha in (0.5, 1.7):
                y = constant_field(grid128, 2.0)
                out = graph_velocity(y, normal_velocity(y, alpha, law))
                assert np.abs(out.values + 1.0).max() == 0.0
