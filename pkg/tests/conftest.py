import numpy as np
import pytest

from chemostokes.grid import FaceVectorField, GridSpec, ScalarField


@pytest.fixture
def grid32():
    return GridSpec(2, (32, 32), (1.0, 1.0))


@pytest.fixture
def grid_rect():
    return GridSpec(2, (16, 24), (2.0, 1.5))


@pytest.fixture
def grid3d():
    return GridSpec(3, (8, 8, 8), (1.0, 1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_scalar(grid, rng, lo=0.0, hi=1.0):
    return ScalarField(grid, rng.uniform(lo, hi, size=grid.cells))


def random_interior_face_field(grid, rng, scale=1.0):
    """Random face field with exactly zero boundary-normal entries."""
    comps = []
    for a in range(grid.dim):
        arr = rng.uniform(-scale, scale, size=grid.face_shape(a))
        sl = [slice(None)] * grid.dim
        sl[a] = 0
        arr[tuple(sl)] = 0.0
        sl[a] = -1
        arr[tuple(sl)] = 0.0
        comps.append(arr)
    return FaceVectorField(grid, tuple(comps))
