"""Initial-data profile library.

The model only demands bounded nonnegative initial density, a Lipschitz
nonnegative initial solute, and a compatible starting velocity; the
concrete shapes below are the run configurations this laboratory ships.
The starting velocity is always zero, which satisfies the compatibility
class trivially.
"""

from __future__ import annotations

import numpy as np

from .grid import FaceVectorField, GridSpec, ScalarField
from .operators import integrate


def gaussian_density(grid: GridSpec, center, sigma: float, mass: float) -> ScalarField:
    """Gaussian bump normalized so the discrete integral equals ``mass``."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if mass < 0.0:
        raise ValueError("mass must be nonnegative")
    center = tuple(float(v) for v in center)
    if len(center) != grid.dim:
        raise ValueError("center dimension mismatch")
    mesh = grid.center_mesh()
    r2 = np.zeros(grid.cells)
    for a in range(grid.dim):
        r2 += (mesh[a] - center[a]) ** 2
    raw = ScalarField(grid, np.exp(-r2 / (2.0 * sigma * sigma)))
    total = integrate(raw)
    return ScalarField(grid, raw.values * (mass / total))


def uniform_field(grid: GridSpec, value: float) -> ScalarField:
    if value < 0.0:
        raise ValueError("initial fields must be nonnegative")
    return ScalarField.full(grid, value)


def linear_field(grid: GridSpec, axis: int, low: float, high: float) -> ScalarField:
    """Affine ramp along one axis, ``low`` at coordinate 0 to ``high`` at L."""
    if min(low, high) < 0.0:
        raise ValueError("initial fields must be nonnegative")
    if not (0 <= axis < grid.dim):
        raise ValueError(f"axis {axis} out of range for dim {grid.dim}")
    x = grid.center_mesh()[axis]
    L = grid.lengths[axis]
    return ScalarField(grid, low + (high - low) * x / L)


def random_density(grid: GridSpec, lo: float, hi: float, seed: int) -> ScalarField:
    """Seeded uniform noise in [lo, hi); handy for stress tests."""
    if not (0.0 <= lo <= hi):
        raise ValueError("need 0 <= lo <= hi")
    rng = np.random.default_rng(seed)
    return ScalarField(grid, rng.uniform(lo, hi, size=grid.cells))


def zero_velocity(grid: GridSpec) -> FaceVectorField:
    return FaceVectorField(grid)


def build_density(grid: GridSpec, spec: dict, seed: int = 0) -> ScalarField:
    kind = spec.get("profile", "gaussian")
    if kind == "gaussian":
        center = spec.get("center", tuple(L / 2 for L in grid.lengths))
        return gaussian_density(grid, center, spec.get("sigma", 0.5),
                                spec.get("mass", 1.0))
    if kind == "uniform":
        return uniform_field(grid, spec.get("value", 1.0))
    if kind == "zero":
        return ScalarField(grid)
    if kind == "random":
        return random_density(grid, spec.get("lo", 0.0), spec.get("hi", 1.0), seed)
    raise ValueError(f"unknown density profile {kind!r}")


def build_solute(grid: GridSpec, spec: dict) -> ScalarField:
    kind = spec.get("profile", "uniform")
    if kind == "uniform":
        return uniform_field(grid, spec.get("value", 1.0))
    if kind == "linear":
        return linear_field(grid, int(spec.get("axis", 0)),
                            spec.get("low", 0.0), spec.get("high", 1.0))
    if kind == "zero":
        return ScalarField(grid)
    raise ValueError(f"unknown solute profile {kind!r}")
