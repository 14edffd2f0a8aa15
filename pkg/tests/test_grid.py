"""Grid containers and discrete calculus against independent oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemostokes.grid import FaceVectorField, GridSpec, ScalarField
from chemostokes.operators import (divergence, face_inner_sum, gradient,
                                   integrate, laplacian, reduce_extrema)
from chemostokes.reductions import tree_dot, tree_sum
from chemostokes.threads import set_thread_count

from conftest import random_interior_face_field, random_scalar


def kahan_sum(values):
    """Serial compensated sum, the oracle for the tree reduction."""
    total = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


class TestGridSpec:
    def test_spacing_is_exact_ratio(self):
        g = GridSpec(2, (48, 96), (1.0, 3.0))
        assert g.spacing == (1.0 / 48, 3.0 / 96)
        assert g.cell_volume == pytest.approx((1.0 / 48) * (3.0 / 96))

    @pytest.mark.parametrize("bad", [
        dict(dim=1, cells=(8,), lengths=(1.0,)),
        dict(dim=4, cells=(8,) * 4, lengths=(1.0,) * 4),
        dict(dim=2, cells=(3, 8), lengths=(1.0, 1.0)),
        dict(dim=2, cells=(8, 8), lengths=(0.0, 1.0)),
        dict(dim=2, cells=(8,), lengths=(1.0, 1.0)),
    ])
    def test_invalid_specs_rejected(self, bad):
        with pytest.raises(ValueError):
            GridSpec(**bad)

    def test_face_shapes(self, grid_rect):
        assert grid_rect.face_shape(0) == (17, 24)
        assert grid_rect.face_shape(1) == (16, 25)

    def test_boundary_distance(self, grid32):
        assert grid32.boundary_distance((0.5, 0.5)) == pytest.approx(0.5)
        assert grid32.boundary_distance((0.0, 0.5)) == 0.0
        with pytest.raises(ValueError):
            grid32.boundary_distance((1.5, 0.5))


class TestIntegrate:
    def test_unit_field_unit_box(self, grid32):
        assert integrate(ScalarField.full(grid32, 1.0)) == 1.0

    def test_zero_field(self, grid32):
        assert integrate(ScalarField(grid32)) == 0.0

    def test_matches_kahan_oracle(self, grid32, rng):
        f = random_scalar(grid32, rng)
        expected = grid32.cell_volume * kahan_sum(f.values.ravel().tolist())
        got = integrate(f)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_rejects_nonfinite_with_cell_index(self, grid32):
        f = ScalarField.full(grid32, 1.0)
        f.values[3, 7] = np.nan
        with pytest.raises(ValueError, match=r"\(3, 7\)"):
            integrate(f)

    def test_volume_weighting(self, grid_rect):
        f = ScalarField.full(grid_rect, 2.0)
        assert integrate(f) == pytest.approx(2.0 * grid_rect.volume, rel=1e-15)


class TestTreeReductions:
    def test_matches_kahan_on_long_vector(self, rng):
        a = rng.uniform(0.0, 1.0, size=1024)
        assert tree_sum(a) == pytest.approx(kahan_sum(a.tolist()), rel=1e-14)

    def test_dot_matches_serial(self, rng):
        a = rng.standard_normal(513)
        b = rng.standard_normal(513)
        serial = kahan_sum((a * b).tolist())
        assert tree_dot(a, b) == pytest.approx(serial, rel=1e-12, abs=1e-13)

    def test_empty_and_singleton(self):
        assert tree_sum(np.array([])) == 0.0
        assert tree_sum(np.array([42.0])) == 42.0

    def test_bit_identical_across_thread_counts(self, rng):
        a = rng.uniform(-1.0, 1.0, size=2309)  # odd, exercises tail carry
        results = []
        for threads in (1, 2, 8):
            set_thread_count(threads)
            results.append(tree_sum(a))
        set_thread_count(1)
        assert results[0] == results[1] == results[2]


@given(values=st.lists(st.floats(min_value=-1e6, max_value=1e6),
                       min_size=1, max_size=257))
@settings(max_examples=100, deadline=None)
def test_tree_sum_close_to_exact(values):
    arr = np.array(values)
    exact = math.fsum(values)
    got = tree_sum(arr)
    scale = sum(abs(v) for v in values) or 1.0
    assert abs(got - exact) <= 1e-12 * scale


class TestGradient:
    def test_constant_gives_zero(self, grid32):
        g = gradient(ScalarField.full(grid32, 2.5))
        for comp in g.components:
            assert np.all(comp == 0.0)

    def test_linear_in_x(self, grid32):
        mesh = grid32.center_mesh()
        f = ScalarField(grid32, mesh[0].copy())
        g = gradient(f)
        interior = g.components[0][1:-1, :]
        assert np.allclose(interior, 1.0, rtol=0, atol=1e-13)
        assert np.all(g.components[0][0, :] == 0.0)
        assert np.all(g.components[0][-1, :] == 0.0)
        assert np.allclose(g.components[1][:, 1:-1], 0.0, atol=1e-13)

    def test_sine_second_order(self):
        # Taylor oracle: interior face-centered difference of sin(2 pi x)
        # carries an O(h^2) error; measure the order across refinement.
        errors = []
        for n in (32, 64, 128):
            g = GridSpec(2, (n, n), (1.0, 1.0))
            x = g.center_mesh()[0]
            f = ScalarField(g, np.sin(2 * np.pi * x))
            grad = gradient(f)
            xf = g.face_positions(0)[1:-1]
            exact = 2 * np.pi * np.cos(2 * np.pi * xf)[:, None]
            err = np.max(np.abs(grad.components[0][1:-1, :] - exact))
            errors.append(err)
        orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert min(orders) >= 1.9


class TestDivergence:
    def test_zero_field(self, grid32):
        F = FaceVectorField(grid32)
        assert np.all(divergence(F).values == 0.0)

    def test_div_grad_equals_laplacian_bitwise(self, grid32, rng):
        f = random_scalar(grid32, rng)
        lhs = divergence(gradient(f)).values
        rhs = laplacian(f).values
        assert np.array_equal(lhs, rhs)

    def test_laplacian_matches_stencil_algebra(self, grid_rect, rng):
        # independent dense-stencil oracle with mirror ghosts
        f = random_scalar(grid_rect, rng)
        v = f.values
        hx, hy = grid_rect.spacing
        ext = np.pad(v, 1, mode="edge")
        oracle = ((ext[2:, 1:-1] - 2 * v + ext[:-2, 1:-1]) / hx ** 2
                  + (ext[1:-1, 2:] - 2 * v + ext[1:-1, :-2]) / hy ** 2)
        assert np.allclose(laplacian(f).values, oracle, rtol=1e-12, atol=1e-12)

    def test_discrete_divergence_theorem(self, grid_rect, rng):
        F = random_interior_face_field(grid_rect, rng, scale=3.0)
        total = integrate(divergence(F))
        fmax = max(np.max(np.abs(c)) for c in F.components)
        assert abs(total) <= 1e-13 * fmax * grid_rect.volume

    def test_duality_of_gradient_and_divergence(self, grid_rect, rng):
        # <F, grad a> = -<a, div F> for interior-supported F
        F = random_interior_face_field(grid_rect, rng)
        a = random_scalar(grid_rect, rng)
        lhs = face_inner_sum(F, gradient(a))
        rhs = -grid_rect.cell_volume * tree_sum(a.values * divergence(F).values)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-13)


class TestExtrema:
    def test_constant(self, grid32):
        assert reduce_extrema(ScalarField.full(grid32, 3.0)) == (3.0, 3.0)

    def test_single_negative_entry(self, grid32):
        f = ScalarField(grid32)
        f.values[5, 9] = -1.0
        assert reduce_extrema(f) == (-1.0, 0.0)

    def test_matches_serial_scan(self, grid32, rng):
        f = random_scalar(grid32, rng, -5.0, 5.0)
        lo = min(f.values.ravel().tolist())
        hi = max(f.values.ravel().tolist())
        assert reduce_extrema(f) == (lo, hi)


class TestThreeD:
    def test_integrate_and_laplacian(self, grid3d, rng):
        assert integrate(ScalarField.full(grid3d, 1.0)) == pytest.approx(1.0)
        f = random_scalar(grid3d, rng)
        assert np.array_equal(divergence(gradient(f)).values,
                              laplacian(f).values)

    def test_divergence_theorem(self, grid3d, rng):
        F = random_interior_face_field(grid3d, rng)
        assert abs(integrate(divergence(F))) <= 1e-13


class TestFaceVectorField:
    def test_shape_validation(self, grid32):
        with pytest.raises(ValueError):
            FaceVectorField(grid32, (np.zeros((32, 32)), np.zeros((32, 33))))

    def test_boundary_helpers(self, grid32, rng):
        F = FaceVectorField(grid32)
        F.components[0][0, 3] = 2.0
        assert F.boundary_normal_max() == 2.0
        F.zero_boundary_normals()
        assert F.boundary_normal_max() == 0.0
