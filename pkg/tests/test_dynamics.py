import numpy as np
import pytest

from flamefront.dynamics import (
    ModelParams,
    make_split,
    rhs_for,
    rhs_graph,
    rhs_ks,
    rhs_ks_rescaled,
    rhs_mollified,
    rhs_phi,
)
from flamefront.geometry import graph_velocity, normal_velocity
from flamefront.spectral import (
    Grid,
    RealField,
    apply_symbol,
    constant_field,
    derivative,
    forward_transform,
    mollify,
    sobolev_norm,
    zero_field,
)

from conftest import make_band_limited, make_smooth_graph


def rel_l2(out, reference):
    diff = RealField(out.grid, out.values - reference.values)
    return sobolev_norm(diff, 0) / sobolev_norm(reference, 0)


class TestModelParams:
    def test_rejects_unknown_model(self):
        with pytest.raises(ValueError):
            ModelParams("navier_stokes", 1.0)

    def test_mollified_requires_delta(self):
        with pytest.raises(ValueError):
            ModelParams("graph_mollified", 1.0)

    def test_phi_defaults_alpha(self):
        p = ModelParams("phi", epsilon=0.25)
        assert p.alpha == 1.25

    def test_phi_alpha_override(self):
        p = ModelParams("phi", alpha=1.5, epsilon=0.25)
        assert p.alpha == 1.5

    def test_rescaled_defaults_alpha_two(self):
        assert ModelParams("ks_rescaled").alpha == 2.0

    def test_alpha_required_otherwise(self):
        with pytest.raises(ValueError):
            ModelParams("graph")


class TestRhsKs:
    def test_constant_is_stationary(self, grid128):
        out = rhs_ks(constant_field(grid128, 3.0), 1.5)
        assert np.abs(out.values).max() < 1e-14

    def test_linearization_rate(self, grid128):
        # tiny single mode: rhs is a * ((alpha-1) k^2 - 4 k^4) sin(kx) + O(a^2)
        a, k, alpha = 1e-8, 3.0, 1.5
        f = RealField(grid128, a * np.sin(k * grid128.x))
        predicted = a * ((alpha - 1.0) * k**2 - 4.0 * k**4) * np.sin(k * grid128.x)
        out = rhs_ks(f, alpha)
        assert np.abs(out.values - predicted).max() / np.abs(predicted).max() < 1e-6

    def test_mean_identity(self, grid128):
        for seed in range(3):
            f = make_band_limited(grid128, 12, seed=seed, taper=0.2)
            out = rhs_ks(f, 2.0)
            f_x = derivative(f, 1).values
            expected = -0.5 * np.mean(f_x**2)
            assert abs(np.mean(out.values) - expected) < 1e-10 * max(1.0, abs(expected))


class TestRhsKsRescaled:
    def test_zero(self, grid128):
        assert np.abs(rhs_ks_rescaled(zero_field(grid128)).values).max() == 0.0

    def test_equals_ks_alpha_two(self, grid128):
        f = make_band_limited(grid128, 10, seed=4)
        assert np.array_equal(rhs_ks_rescaled(f).values, rhs_ks(f, 2.0).values)

    def test_neutral_mode_half(self):
        # k = 1/2 on L = 4 pi: linear rate k^2 - 4 k^4 = 0, so only the
        # quadratic term remains and the rhs is O(amplitude^2)
        grid = Grid(4 * np.pi, 64)
        a = 1e-6
        u = RealField(grid, a * np.sin(0.5 * grid.x))
        out = rhs_ks_rescaled(u)
        assert np.abs(out.values).max() < 10 * a**2


class TestRhsGraph:
    def test_constant_translates_down(self, grid128):
        for alpha in (0.5, 1.0, 2.0):
            out = rhs_graph(constant_field(grid128, 7.0), alpha)
            assert np.abs(out.values + 1.0).max() < 1e-13

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.1, 2.0])
    def test_matches_geometry_composition(self, alpha):
        # independently assemble the law from the normal-velocity and
        # frame-change operators; this re-derives the expanded equation
        grid = Grid(2 * np.pi, 256)
        for seed in range(5):
            y = make_smooth_graph(grid, 6, 0.7, seed=seed)
            expanded = rhs_graph(y, alpha)
            composed = graph_velocity(y, normal_velocity(y, alpha, "full"))
            assert rel_l2(expanded, composed) < 1e-9

    def test_alpha_continuity(self, grid128):
        y = make_smooth_graph(grid128, 6, 0.5, seed=9)
        base = rhs_graph(y, 1.0)
        bumped = rhs_graph(y, 1.0 + 1e-8)
        scale = np.abs(base.values).max()
        # O(1e-8) relative change for an O(1e-8) coefficient perturbation
        assert np.abs(bumped.values - base.values).max() < 100 * 1e-8 * scale

    def test_simplified_law_matches_composition(self, grid128):
        y = make_smooth_graph(grid128, 5, 0.4, seed=10)
        out = rhs_graph(y, 1.2, law="simplified")
        composed = graph_velocity(y, normal_velocity(y, 1.2, "simplified"))
        assert rel_l2(out, composed) < 1e-9

    def test_rejects_unknown_law(self, grid128):
        with pytest.raises(ValueError):
            rhs_graph(zero_field(grid128), 1.0, law="cubic")


class TestRhsMollified:
    def test_tiny_delta_reduces_to_graph(self, grid128):
        y = make_smooth_graph(grid128, 8, 0.5, seed=11)
        delta = 1.0 / grid128.N  # cutoff beyond the padded Nyquist
        out = rhs_mollified(y, 1.2, delta)
        ref = rhs_graph(y, 1.2)
        assert np.abs(out.values - ref.values).max() < 1e-10

    def test_constant_translates_down(self, grid128):
        out = rhs_mollified(constant_field(grid128, 4.0), 1.7, 0.3)
        assert np.abs(out.values + 1.0).max() < 1e-13

    def test_output_band_limited(self, grid128):
        y = make_smooth_graph(grid128, 20, 0.8, seed=12, taper=0.1)
        delta = 0.25  # cutoff wavenumber 4
        out = rhs_mollified(y, 1.2, delta)
        coeffs = forward_transform(out).coefficients
        outside = np.abs(grid128.k) > 1.0 / delta
        assert np.abs(coeffs[outside]).max() < 1e-12

    def test_rejects_bad_delta(self, grid128):
        with pytest.raises(ValueError):
            rhs_mollified(zero_field(grid128), 1.0, 0.0)


class TestRhsPhi:
    def test_constant_is_stationary(self, grid128):
        out = rhs_phi(constant_field(grid128, 2.0), 1.1, 0.1)
        assert np.abs(out.values).max() < 1e-14

    def test_epsilon_zero_reduces_to_rescaled_ks(self, grid128):
        for seed in range(5):
            f = make_band_limited(grid128, 10, seed=seed, taper=0.3)
            out = rhs_phi(f, 1.0, 0.0)
            ref = rhs_ks_rescaled(f)
            assert rel_l2(out, ref) < 1e-12

    def test_first_order_remainder(self, grid128):
        # || rhs_phi(., 1+eps, eps) - rhs_ks_rescaled || = O(eps); the ratio
        # between eps = 1e-2 and eps = 1e-3 is 10 up to O(eps) corrections
        f = make_band_limited(grid128, 8, seed=6, taper=0.4)
        ref = rhs_ks_rescaled(f)
        gaps = {}
        for eps in (1e-2, 1e-3):
            out = rhs_phi(f, 1.0 + eps, eps)
            gaps[eps] = sobolev_norm(RealField(grid128, out.values - ref.values), 0)
        assert gaps[1e-2] / gaps[1e-3] == pytest.approx(10.0, abs=1.0)

    def test_rejects_negative_epsilon(self, grid128):
        with pytest.raises(ValueError):
            rhs_phi(zero_field(grid128), 1.0, -0.1)


class TestMakeSplit:
    def test_rescaled_symbol_value(self):
        split = make_split(ModelParams("ks_rescaled"))
        assert split.linear_symbol(np.array([1.0]))[0] == pytest.approx(-3.0)

    def test_graph_symbol_value(self):
        split = make_split(ModelParams("graph", 1.0))
        assert split.linear_symbol(np.array([1.0]))[0] == pytest.approx(-4.0)

    def test_ks_symbol_zero_at_origin_negative_at_large_k(self, grid128):
        for params in (ModelParams("ks", 1.5), ModelParams("ks_rescaled")):
            sym = make_split(params).linear_symbol(grid128.k)
            assert sym[0] == 0.0
            assert sym[grid128.nyquist] < 0.0

    def test_mollified_symbol_masked(self, grid128):
        split = make_split(ModelParams("graph_mollified", 1.0, delta=0.25))
        sym = split.linear_symbol(grid128.k)
        outside = np.abs(grid128.k) > 4.0
        assert np.all(sym[outside] == 0.0)
        assert sym[2] == pytest.approx(-4.0 * 2.0**4)

    @pytest.mark.parametrize(
        "params",
        [
            ModelParams("ks", 1.5),
            ModelParams("ks_rescaled"),
            ModelParams("graph", 1.1),
            ModelParams("graph", 1.1, law="simplified"),
            ModelParams("graph_mollified", 1.1, delta=0.25),
            ModelParams("phi", epsilon=0.1),
        ],
    )
    def test_reconstruction(self, grid128, params):
        u = make_smooth_graph(grid128, 8, 0.4, seed=13)
        if params.model == "graph_mollified":
            u = mollify(u, params.delta)
        split = make_split(params)
        linear = apply_symbol(u, split.linear_symbol(grid128.k))
        recon = linear.values + split.nonlinear(u).values
        full = rhs_for(params)(u).values
        scale = max(1.0, np.abs(full).max())
        assert np.abs(recon - full).max() / scale < 1e-10


def test_all_rhs_real_valued(grid128):
    # imaginary residue of every model tendency stays at the noise floor
    u = make_smooth_graph(grid128, 8, 0.4, seed=14)
    for params in (
        ModelParams("ks", 1.5),
        ModelParams("ks_rescaled"),
        ModelParams("graph", 1.1),
        ModelParams("graph_mollified", 1.1, delta=0.3),
        ModelParams("phi", epsilon=0.2),
    ):
        out = rhs_for(params)(u)
        spectrum = forward_transform(out).coefficients
        hermitian_defect = spectrum - np.conj(np.roll(spectrum[::-1], 1))
        assert np.abs(hermitian_defect).max() < 1e-12
