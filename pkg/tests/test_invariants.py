"""Energy functionals against a naive loop oracle; series checks."""

import pytest

from chemostokes.grid import GridSpec, ScalarField
from chemostokes.initial import uniform_field
from chemostokes.invariants import (InvariantRow, check_divergence,
                                    check_mass, check_max_principle,
                                    check_positivity, energy_functional,
                                    energy_parts, odi_monitor)
from chemostokes.model import ModelParams
from chemostokes.operators import integrate
from chemostokes.runner import run
from chemostokes.scenarios import diffusion_only_setup
from chemostokes.solver import initial_state

from conftest import random_interior_face_field, random_scalar


def naive_energy(n, c, ux, uy, eps, p, q, m, hx, hy):
    """Loop transcription of the documented discrete definitions."""
    N0, N1 = n.shape
    vol = hx * hy
    s = 0.5 * (m + p - 1.0)

    def gx_bar(i, j):
        gl = (c[i, j] - c[i - 1, j]) / hx if i >= 1 else 0.0
        gr = (c[i + 1, j] - c[i, j]) / hx if i + 1 <= N0 - 1 else 0.0
        return 0.5 * (gl + gr)

    def gy_bar(i, j):
        gl = (c[i, j] - c[i, j - 1]) / hy if j >= 1 else 0.0
        gr = (c[i, j + 1] - c[i, j]) / hy if j + 1 <= N1 - 1 else 0.0
        return 0.5 * (gl + gr)

    y_n = y_c = d_c = 0.0
    for i in range(N0):
        for j in range(N1):
            y_n += (n[i, j] + eps) ** p * vol
            g2 = gx_bar(i, j) ** 2 + gy_bar(i, j) ** 2
            y_c += g2 ** q * vol
            cc = c[i, j]
            cl = c[i - 1, j] if i >= 1 else cc
            cr = c[i + 1, j] if i + 1 <= N0 - 1 else cc
            cb = c[i, j - 1] if j >= 1 else cc
            ct = c[i, j + 1] if j + 1 <= N1 - 1 else cc
            hxx = (cr - 2 * cc + cl) / hx ** 2
            hyy = (ct - 2 * cc + cb) / hy ** 2
            hxy = 0.5 * (gx_bar(i, min(j + 1, N1 - 1))
                         - gx_bar(i, max(j - 1, 0))) / hy
            hyx = 0.5 * (gy_bar(min(i + 1, N0 - 1), j)
                         - gy_bar(max(i - 1, 0), j)) / hx
            h2 = hxx ** 2 + hyy ** 2 + hxy ** 2 + hyx ** 2
            d_c += g2 ** (q - 1.0) * h2 * vol
    d_n = 0.0
    for i in range(1, N0):
        for j in range(N1):
            a = (n[i, j] + eps) ** s
            b = (n[i - 1, j] + eps) ** s
            d_n += ((a - b) / hx) ** 2 * vol
    for i in range(N0):
        for j in range(1, N1):
            a = (n[i, j] + eps) ** s
            b = (n[i, j - 1] + eps) ** s
            d_n += ((a - b) / hy) ** 2 * vol
    y_u = 0.0
    for i in range(N0):
        for j in range(N1):
            y_u += ((ux[i + 1, j] - ux[i, j]) / hx) ** 2 * vol
            y_u += ((uy[i, j + 1] - uy[i, j]) / hy) ** 2 * vol
    for i in range(N0 + 1):
        for j in range(N1 + 1):
            lo = -ux[i, 0] if j == 0 else ux[i, j - 1]
            hi = -ux[i, N1 - 1] if j == N1 else ux[i, j]
            y_u += ((hi - lo) / hy) ** 2 * vol
            lo = -uy[0, j] if i == 0 else uy[i - 1, j]
            hi = -uy[N0 - 1, j] if i == N0 else uy[i, j]
            y_u += ((hi - lo) / hx) ** 2 * vol
    d_u = 0.0
    for i in range(1, N0):
        for j in range(N1):
            uc = ux[i, j]
            ub = -uc if j == 0 else ux[i, j - 1]
            ut = -uc if j == N1 - 1 else ux[i, j + 1]
            lap = ((ux[i + 1, j] - 2 * uc + ux[i - 1, j]) / hx ** 2
                   + (ut - 2 * uc + ub) / hy ** 2)
            d_u += lap ** 2 * vol
    for i in range(N0):
        for j in range(1, N1):
            uc = uy[i, j]
            ul = -uc if i == 0 else uy[i - 1, j]
            ur = -uc if i == N0 - 1 else uy[i + 1, j]
            lap = ((ur - 2 * uc + ul) / hx ** 2
                   + (uy[i, j + 1] - 2 * uc + uy[i, j - 1]) / hy ** 2)
            d_u += lap ** 2 * vol
    return y_n + y_c + y_u, d_n + d_c + d_u


class TestEnergyFunctional:
    def test_zero_state(self, grid32):
        state = initial_state(grid32, ScalarField(grid32), ScalarField(grid32))
        y, d = energy_functional(state, 2.0, 2.0, 2.0, eps=0.0)
        assert y == 0.0 and d == 0.0

    def test_uniform_state_box_volume(self, grid_rect):
        state = initial_state(grid_rect, uniform_field(grid_rect, 1.0),
                              uniform_field(grid_rect, 0.5))
        y, d = energy_functional(state, 2.0, 2.0, 2.0, eps=0.0)
        assert y == pytest.approx(grid_rect.volume, rel=1e-13)
        assert d == 0.0

    def test_matches_naive_oracle(self, rng):
        g = GridSpec(2, (7, 6), (1.0, 0.8))
        n = random_scalar(g, rng, 0.0, 2.0)
        c = random_scalar(g, rng, 0.0, 1.0)
        u = random_interior_face_field(g, rng, 0.5)
        state = initial_state(g, n, c, u)
        y, d = energy_functional(state, 2.3, 1.7, 2.1, eps=0.04)
        y_ref, d_ref = naive_energy(n.values, c.values, u.components[0],
                                    u.components[1], 0.04, 2.3, 1.7, 2.1,
                                    *g.spacing)
        assert y == pytest.approx(y_ref, rel=1e-10)
        assert d == pytest.approx(d_ref, rel=1e-10)

    def test_kernel_agrees_with_generic_path(self, rng):
        from chemostokes.invariants import _energy_parts_generic
        g = GridSpec(2, (12, 9), (1.3, 1.0))
        state = initial_state(g, random_scalar(g, rng, 0.0, 2.0),
                              random_scalar(g, rng, 0.0, 1.0),
                              random_interior_face_field(g, rng, 0.4))
        fast = energy_parts(state, 2.0, 1.5, 2.0, 0.01)
        ref = _energy_parts_generic(state, 2.0, 1.5, 2.0, 0.01)
        for key in fast:
            assert fast[key] == pytest.approx(ref[key], rel=1e-12, abs=1e-15)

    def test_monotone_in_density(self, grid32, rng):
        n = random_scalar(grid32, rng, 0.1, 1.0)
        state = initial_state(grid32, n, ScalarField(grid32))
        y0 = energy_parts(state, 2.0, 2.0, 2.0, 0.0)["y_n"]
        state.n.values[3, 3] += 0.5
        y1 = energy_parts(state, 2.0, 2.0, 2.0, 0.0)["y_n"]
        assert y1 > y0

    def test_dissipation_zero_iff_trivial(self, grid32, rng):
        state = initial_state(grid32, uniform_field(grid32, 0.7),
                              uniform_field(grid32, 0.3))
        _, d = energy_functional(state, 2.0, 2.0, 2.0, 0.0)
        assert d <= 1e-12
        state.n.values[4, 4] += 0.2
        _, d2 = energy_functional(state, 2.0, 2.0, 2.0, 0.0)
        assert d2 > 1e-8

    def test_exponent_validation(self, grid32):
        state = initial_state(grid32, ScalarField(grid32), ScalarField(grid32))
        with pytest.raises(ValueError):
            energy_functional(state, 1.0, 2.0, 2.0)

    def test_3d_trivial_cases(self, grid3d):
        state = initial_state(grid3d, uniform_field(grid3d, 1.0),
                              uniform_field(grid3d, 1.0))
        y, d = energy_functional(state, 2.0, 2.0, 2.0, 0.0)
        assert y == pytest.approx(grid3d.volume, rel=1e-12)
        assert d == 0.0


def rows_from(masses, start_step=0, step_gap=1):
    rows = []
    for k, mass in enumerate(masses):
        rows.append(InvariantRow(step=start_step + k * step_gap,
                                 t=0.01 * k, dt=0.01, mass=mass,
                                 n_min=0.0, n_max=1.0, c_min=0.0, c_max=1.0,
                                 div_u_inf=0.0, energy=1.0, dissipation=0.0))
    return rows


class TestSeriesChecks:
    def test_mass_constant_passes(self):
        verdict = check_mass(rows_from([1.0, 1.0, 1.0]))
        assert verdict.passed and verdict.worst_value == 0.0

    def test_mass_fault_injected_series_fails(self):
        verdict = check_mass(rows_from([1.0, 1.0, 1.0 + 1e-9]))
        assert not verdict.passed
        assert verdict.worst_value == pytest.approx(1e-9, rel=1e-6)

    def test_mass_budget_scales_with_steps(self):
        rows = rows_from([1.0, 1.0 + 5e-13], step_gap=5000)
        assert check_mass(rows).passed

    def test_mass_fault_injected_flux_fails(self, grid32, rng):
        # a mutant update that leaks through one face family
        from chemostokes.solver import _chemo_velocity, _total_n_flux
        state = initial_state(grid32, random_scalar(grid32, rng, 0.5, 1.5),
                              random_scalar(grid32, rng))
        params = ModelParams(m=2.0, l=2.5, eps=0.01, s0=0.5, beta_s=0.3,
                             grav=(0.0, 0.0))
        w, _ = _chemo_velocity(state, params)
        F = _total_n_flux(state, params, w)
        # classic conservation bug: the right-face flux is evaluated with a
        # different formula than the left-face flux, so nothing telescopes
        Fx_right = F[0] * 1.01
        dt = 1e-5
        div = ((Fx_right[1:, :] - F[0][:-1, :]) / grid32.spacing[0]
               + (F[1][:, 1:] - F[1][:, :-1]) / grid32.spacing[1])
        n1 = ScalarField(grid32, state.n.values - dt * div)
        rows = rows_from([integrate(state.n), integrate(n1)])
        assert not check_mass(rows).passed

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            check_mass(rows_from([1.0]))

    def test_max_principle_cases(self):
        rows = rows_from([1.0, 1.0])
        assert check_max_principle(rows, 1.0).passed
        assert not check_max_principle(rows, 0.5).passed

    def test_positivity_and_divergence(self):
        rows = rows_from([1.0, 1.0])
        assert check_positivity(rows).passed
        assert check_divergence(rows).passed
        bad = rows_from([1.0, 1.0])
        object.__setattr__(bad[1], "n_min", -1e-6)
        assert not check_positivity(bad).passed

    def test_verdict_json_schema(self):
        import json
        from chemostokes.fldio import load_schema, validate_json
        verdict = check_mass(rows_from([1.0, 1.0]))
        payload = json.loads(verdict.to_json())
        validate_json(payload, load_schema("verdict"))


class TestOdiMonitor:
    def test_decaying_diffusion_run_bounded(self):
        state, params, opts = diffusion_only_setup(16, 0.5, 0.05)
        result = run(state, params, opts)
        verdict = odi_monitor(result.rows)
        assert verdict.bounded
        assert verdict.c_damp >= 0.0
        assert verdict.sup_y == pytest.approx(result.rows[0].energy, rel=1e-6)

    def test_energy_actually_decays(self):
        state, params, opts = diffusion_only_setup(16, 0.5, 0.05)
        result = run(state, params, opts)
        energies = [r.energy for r in result.rows]
        assert energies[-1] < energies[0]

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            odi_monitor(rows_from([1.0, 1.0]))

    def test_exploding_series_not_bounded(self):
        masses = [1.0] * 30
        rows = rows_from(masses)
        rows = [InvariantRow(step=r.step, t=r.t, dt=r.dt, mass=r.mass,
                             n_min=r.n_min, n_max=r.n_max, c_min=r.c_min,
                             c_max=r.c_max, div_u_inf=r.div_u_inf,
                             energy=float(2.0 ** k), dissipation=0.0)
                for k, r in enumerate(rows)]
        assert not odi_monitor(rows).bounded
