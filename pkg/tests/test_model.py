"""Constitutive pieces: cutoff, tensor, response and consumption laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemostokes.grid import GridSpec
from chemostokes.model import (ModelParams, boundary_cutoff, consumption,
                               mix_matrix, rho_eps, sensitivity_magnitude,
                               sensitivity_tensor, smoothstep)


@pytest.fixture
def grid():
    return GridSpec(2, (16, 16), (1.0, 1.0))


@pytest.fixture
def grid3():
    return GridSpec(3, (8, 8, 8), (1.0, 1.0, 1.0))


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [
        dict(m=1.0), dict(m=0.5),
        dict(l=2.0), dict(l=1.5),
        dict(eps=-0.1), dict(eps=1.0),
        dict(s0=-1.0),
        dict(alpha_s=0.0, beta_s=0.0),
        dict(s_law="cubic"), dict(f_law="quadratic"),
        dict(grav=(1.0,)),
        dict(rotation_axis=(0.0, 0.0, 2.0)),
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)

    def test_eps_zero_allowed(self):
        assert ModelParams(eps=0.0).eps == 0.0

    def test_grad_phi_is_minus_grav(self):
        p = ModelParams(grav=(0.0, -0.5))
        assert p.grad_phi == (0.0, 0.5)

    def test_s_tilde_nondecreasing_both_laws(self):
        c = np.linspace(0.0, 10.0, 200)
        for law in ("constant", "affine"):
            p = ModelParams(s_law=law, s0=0.7)
            vals = p.s_tilde(c)
            assert np.all(np.diff(vals) >= 0.0)

    def test_frozen(self):
        p = ModelParams()
        with pytest.raises(AttributeError):
            p.m = 3.0


class TestSmoothstepCutoff:
    def test_smoothstep_endpoints_and_midpoint(self):
        assert smoothstep(-1.0) == 0.0
        assert smoothstep(0.0) == 0.0
        assert smoothstep(1.0) == 1.0
        assert smoothstep(2.0) == 1.0
        # 6 s^5 - 15 s^4 + 10 s^3 at s = 1/2
        assert smoothstep(0.5) == pytest.approx(0.5, abs=1e-15)

    def test_boundary_point_is_zero(self, grid):
        assert rho_eps((0.0, 0.3), grid, 0.1) == 0.0
        assert rho_eps((0.3, 1.0), grid, 0.1) == 0.0

    def test_deep_interior_is_one(self, grid):
        assert rho_eps((0.5, 0.5), grid, 0.1) == 1.0

    def test_monotone_as_eps_decreases(self, grid):
        x = (0.04, 0.5)
        eps_grid = np.linspace(0.3, 0.01, 25)
        vals = [rho_eps(x, grid, float(e)) for e in eps_grid]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
        assert rho_eps(x, grid, 0.05) >= rho_eps(x, grid, 0.1)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.5, 2.0])
    def test_eps_out_of_range_rejected(self, grid, eps):
        with pytest.raises(ValueError):
            rho_eps((0.5, 0.5), grid, eps)

    def test_cutoff_limit_at_eps_zero(self, grid):
        assert boundary_cutoff((0.5, 0.5), grid, 0.0) == 1.0
        assert boundary_cutoff((0.0, 0.5), grid, 0.0) == 0.0


class TestMixMatrix:
    def test_identity_only_2d(self):
        M = mix_matrix(2, 1.0, 0.0)
        assert np.allclose(M, np.eye(2) / np.sqrt(2.0))

    def test_equal_mix_frobenius_one(self):
        for dim in (2, 3):
            M = mix_matrix(dim, 1.0, 1.0)
            assert np.linalg.norm(M) == pytest.approx(1.0, rel=1e-14)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            mix_matrix(2, 0.0, 0.0)

    def test_3d_rotation_generator_is_cross_product(self):
        axis = (0.0, 0.0, 1.0)
        M = mix_matrix(3, 0.0, 1.0, axis)
        v = np.array([1.0, 0.0, 0.0])
        out = M @ v
        cross = np.cross(axis, v) / np.sqrt(2.0)
        assert np.allclose(out, cross)


class TestSensitivityTensor:
    def test_zero_density_zero_tensor(self, grid):
        p = ModelParams(l=2.5)
        S = sensitivity_tensor((0.5, 0.5), 0.0, 1.0, p, grid)
        assert np.all(S == 0.0)

    def test_identity_branch_scaling(self, grid):
        p = ModelParams(l=3.0, alpha_s=1.0, beta_s=0.0, s_law="constant",
                        s0=1.0, eps=0.01)
        S = sensitivity_tensor((0.5, 0.5), 4.0, 1.0, p, grid)
        # n^(l-2) stilde / sqrt(dim) on the diagonal
        assert np.allclose(S, (4.0 / np.sqrt(2.0)) * np.eye(2))

    def test_hand_evaluated_equal_mix_norm(self, grid):
        # 2D, alpha = beta = 1, n = 2, l = 3, constant response 1:
        # Frobenius norm = n^(l-2) = 2 in the deep interior
        p = ModelParams(l=3.0, alpha_s=1.0, beta_s=1.0, s_law="constant",
                        s0=1.0, eps=0.01)
        S = sensitivity_tensor((0.5, 0.5), 2.0, 0.3, p, grid)
        assert np.linalg.norm(S) == pytest.approx(2.0, rel=1e-14)

    def test_boundary_point_exactly_zero(self, grid):
        p = ModelParams(eps=0.05)
        S = sensitivity_tensor((0.0, 0.25), 2.0, 1.0, p, grid)
        assert np.all(S == 0.0)

    def test_negative_inputs_rejected(self, grid):
        p = ModelParams()
        with pytest.raises(ValueError):
            sensitivity_tensor((0.5, 0.5), -1.0, 1.0, p, grid)
        with pytest.raises(ValueError):
            sensitivity_tensor((0.5, 0.5), 1.0, -1.0, p, grid)

    def test_norm_bound_quantified(self, grid):
        # bound |S|_F <= n^(l-2) stilde(c) with interior equality
        rng = np.random.default_rng(7)
        p = ModelParams(l=2.7, alpha_s=0.8, beta_s=-1.3, s_law="affine",
                        s0=0.4, eps=0.2)
        for _ in range(10_000):
            x = tuple(rng.uniform(0.0, 1.0, size=2))
            n = rng.uniform(0.0, 5.0)
            c = rng.uniform(0.0, 3.0)
            S = sensitivity_tensor(x, n, c, p, grid)
            cap = float(sensitivity_magnitude(n, c, p))
            assert np.linalg.norm(S) <= cap * (1.0 + 1e-12)
        S = sensitivity_tensor((0.5, 0.5), 2.0, 1.0, p, grid)
        cap = float(sensitivity_magnitude(2.0, 1.0, p))
        assert np.linalg.norm(S) == pytest.approx(cap, rel=1e-13)

    def test_3d_tensor(self, grid3):
        p = ModelParams(l=2.5, alpha_s=1.0, beta_s=2.0, grav=(0.0, 0.0, -1.0),
                        rotation_axis=(0.0, 1.0, 0.0), eps=0.1)
        S = sensitivity_tensor((0.5, 0.5, 0.5), 3.0, 1.0, p, grid3)
        assert np.linalg.norm(S) == pytest.approx(np.sqrt(3.0), rel=1e-13)


class TestConsumption:
    def test_zero_at_zero_both_laws(self):
        for law in ("linear", "saturating"):
            assert consumption(0.0, ModelParams(f_law=law)) == 0.0

    def test_linear_value(self):
        assert consumption(0.5, ModelParams(f_law="linear")) == 0.5

    def test_saturating_value(self):
        # 1 / (1 + 1)
        assert consumption(1.0, ModelParams(f_law="saturating")) == 0.5

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            consumption(-0.1, ModelParams())

    @given(c=st.floats(min_value=0.0, max_value=1e6))
    @settings(max_examples=200, deadline=None)
    def test_nonnegative_everywhere(self, c):
        for law in ("linear", "saturating"):
            assert consumption(c, ModelParams(f_law=law)) >= 0.0
