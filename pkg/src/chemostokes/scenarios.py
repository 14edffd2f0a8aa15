"""Canned run setups used by the verification suite and the demos."""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, ScalarField
from .initial import gaussian_density, uniform_field, zero_velocity
from .model import ModelParams
from .solver import SolverOptions, initial_state


def smoke_setup(cells: int = 48, t_end: float = 5.0,
                snap_interval: float = 0.5):
    """The standard coupled smoke scenario on the unit square.

    Quadratic diffusion, sensitivity exponent 2.5, cutoff 0.01, an
    equal-weight identity/rotation tensor mix, unit-mass Gaussian
    density, uniform solute 1, rest flow.  The downward pull is strong
    enough (10) that the transient stirring flow sits well above the
    roundoff floor, which keeps the velocity-identity residual a clean
    refinement observable.
    """
    grid = GridSpec(2, (cells, cells), (1.0, 1.0))
    params = ModelParams(m=2.0, l=2.5, eps=0.01, alpha_s=1.0, beta_s=1.0,
                         s_law="constant", s0=1.0, f_law="linear",
                         grav=(0.0, -10.0))
    opts = SolverOptions(safety=0.85, t_end=t_end, snap_interval=snap_interval,
                         proj_tol=1e-8, max_cg_iters=500,
                         energy_p=2.0, energy_q=2.0)
    n0 = gaussian_density(grid, (0.4, 0.6), sigma=0.5, mass=1.0)
    c0 = uniform_field(grid, 1.0)
    state = initial_state(grid, n0, c0, zero_velocity(grid))
    return state, params, opts


def diffusion_only_setup(cells: int = 32, amplitude: float = 0.5,
                         t_end: float = 0.1):
    """Pure solute diffusion: zero density, product-cosine solute mode."""
    grid = GridSpec(2, (cells, cells), (1.0, 1.0))
    params = ModelParams(m=2.0, l=2.5, eps=0.0, alpha_s=1.0, beta_s=0.0,
                         s_law="constant", s0=0.0, f_law="linear",
                         grav=(0.0, 0.0))
    opts = SolverOptions(safety=0.85, t_end=t_end, snap_interval=0.0)
    mesh = grid.center_mesh()
    c0 = ScalarField(grid, 1.0 + amplitude
                     * np.cos(np.pi * mesh[0]) * np.cos(np.pi * mesh[1]))
    state = initial_state(grid, ScalarField(grid), c0, zero_velocity(grid))
    return state, params, opts


def heat_exact(grid: GridSpec, amplitude: float, t: float) -> np.ndarray:
    """Closed-form product-cosine decay used as the diffusion oracle."""
    mesh = grid.center_mesh()
    decay = np.exp(-2.0 * np.pi ** 2 * t)
    return 1.0 + amplitude * decay * np.cos(np.pi * mesh[0]) * np.cos(np.pi * mesh[1])
