"""Weak-identity residuals: exact zeros, manufactured data, refinement."""

import numpy as np
import pytest

from chemostokes.grid import GridSpec, ScalarField
from chemostokes.model import ModelParams
from chemostokes.runner import Trajectory, run
from chemostokes.scenarios import heat_exact, smoke_setup
from chemostokes.solver import initial_state
from chemostokes.studies import barenblatt_profile
from chemostokes.weakform import (battery_residuals, standard_battery,
                                  weak_residual)


def zero_trajectory(grid, times):
    traj = Trajectory()
    for t in times:
        state = initial_state(grid, ScalarField(grid), ScalarField(grid))
        state.t = t
        traj.append(state)
    return traj


def quiet_params(**kw):
    base = dict(m=2.0, l=2.5, eps=0.0, alpha_s=1.0, beta_s=0.0,
                s_law="constant", s0=0.0, f_law="linear", grav=(0.0, 0.0))
    base.update(kw)
    return ModelParams(**base)


def quiet_params3d():
    return ModelParams(m=2.0, l=2.5, eps=0.0, alpha_s=1.0, beta_s=0.0,
                       s_law="constant", s0=0.0, f_law="linear",
                       grav=(0.0, 0.0, 0.0))


class TestBasics:
    def test_zero_trajectory_zero_residuals(self, grid32):
        traj = zero_trajectory(grid32, [0.0, 0.1, 0.2, 0.3])
        battery = standard_battery(grid32, 0.25)
        for fn in battery:
            rep = weak_residual(traj, grid32, quiet_params(), fn)
            assert rep.density == 0.0
            assert rep.solute == 0.0
            assert rep.velocity == 0.0

    def test_noncompact_test_function_rejected(self, grid32):
        traj = zero_trajectory(grid32, [0.0, 0.1, 0.2])
        fn = standard_battery(grid32, 0.5)[0]  # support beyond final time
        with pytest.raises(ValueError, match="compactly"):
            weak_residual(traj, grid32, quiet_params(), fn)

    def test_short_trajectory_rejected(self, grid32):
        traj = zero_trajectory(grid32, [0.0])
        fn = standard_battery(grid32, 0.5)[0]
        with pytest.raises(ValueError):
            weak_residual(traj, grid32, quiet_params(), fn)

    def test_battery_is_three_functions(self, grid32):
        assert len(standard_battery(grid32, 1.0)) == 3

    def test_three_dimensional_shapes(self, grid3d):
        # solenoidal test fields and residual evaluation work in 3D
        traj = zero_trajectory(grid3d, [0.0, 0.05, 0.1])
        for fn in standard_battery(grid3d, 0.08):
            zeta = fn.vector(grid3d, 0.02)
            assert len(zeta) == 3
            for a in range(3):
                assert zeta[a].shape == grid3d.face_shape(a)
            rep = weak_residual(traj, grid3d, quiet_params3d(), fn)
            assert rep.as_tuple() == (0.0, 0.0, 0.0)


class TestPressureGaugeIndependence:
    def test_velocity_residual_ignores_pressure(self):
        state, params, opts = smoke_setup(cells=16, t_end=0.04,
                                          snap_interval=0.01)
        result = run(state, params, opts, collect=True)
        traj = result.trajectory
        battery = standard_battery(state.grid, 0.03)
        before = [weak_residual(traj, state.grid, params, fn) for fn in battery]
        rng = np.random.default_rng(3)
        for arr in traj.P:
            arr += rng.uniform(-10.0, 10.0)  # arbitrary re-gauge
        after = [weak_residual(traj, state.grid, params, fn) for fn in battery]
        for a, b in zip(before, after):
            assert a.velocity == b.velocity
            assert a.density == b.density
            assert a.solute == b.solute


def heat_data_trajectory(cells, intervals, t_end=0.08, amplitude=0.5):
    """Exact diffusion solution inserted as data (never solved)."""
    grid = GridSpec(2, (cells, cells), (1.0, 1.0))
    traj = Trajectory()
    for k in range(intervals + 1):
        t = t_end * k / intervals
        c = ScalarField(grid, heat_exact(grid, amplitude, t))
        state = initial_state(grid, ScalarField(grid), c)
        state.t = t
        traj.append(state)
    return grid, traj


def barenblatt_data_trajectory(cells, intervals, t_end=0.5):
    grid = GridSpec(2, (cells, 4), (8.0, 8.0 * 4 / cells))
    x = grid.centers(0) - 4.0
    traj = Trajectory()
    for k in range(intervals + 1):
        t = t_end * k / intervals
        profile = barenblatt_profile(x, 1.0 + t, 0.5)
        n = ScalarField(grid, np.repeat(profile[:, None], 4, axis=1))
        state = initial_state(grid, n, ScalarField(grid))
        state.t = t
        traj.append(state)
    return grid, traj


class TestManufacturedData:
    def test_heat_solution_solute_residual_refines(self):
        results = []
        for cells, intervals in ((16, 8), (32, 16)):
            grid, traj = heat_data_trajectory(cells, intervals)
            battery = standard_battery(grid, 0.06)
            worst = max(abs(weak_residual(traj, grid, quiet_params(), fn).solute)
                        for fn in battery)
            results.append(worst)
        assert results[0] / results[1] >= 1.5

    def test_barenblatt_density_residual_refines(self):
        results = []
        for cells, intervals in ((64, 8), (128, 16)):
            grid, traj = barenblatt_data_trajectory(cells, intervals)
            battery = standard_battery(grid, 0.4)
            worst = max(abs(weak_residual(traj, grid, quiet_params(), fn).density)
                        for fn in battery)
            results.append(worst)
        assert results[0] / results[1] >= 1.5


class TestSolverTrajectoryRefinement:
    def test_residuals_shrink_with_resolution(self):
        # small fast variant of the full acceptance refinement study
        worst = []
        for cells, snap in ((16, 0.02), (32, 0.01)):
            state, params, opts = smoke_setup(cells=cells, t_end=0.2,
                                              snap_interval=snap)
            result = run(state, params, opts, collect=True)
            battery = standard_battery(state.grid, 0.16)
            _, w = battery_residuals(result.trajectory, state.grid, params,
                                     battery)
            worst.append(w)
        for key in ("density", "solute", "velocity"):
            assert worst[0][key] / worst[1][key] >= 1.5
