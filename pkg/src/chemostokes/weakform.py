"""Residuals of the integral (weak) identities along a trajectory.

Each identity is evaluated with the same discrete fluxes and operators
the scheme uses, paired with grid-sampled smooth space-time test
functions and a midpoint rule over the snapshot intervals.  Summation by
parts is then exact in space, so the residual measures time-quadrature
and trajectory error and shrinks under simultaneous space-time
refinement.

Scalar test functions may be nonzero on the boundary (the discrete
fluxes vanish there); the solenoidal velocity test functions are built
from compactly supported stream functions and vanish near the walls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FaceVectorField, GridSpec, ScalarField
from .model import ModelParams, consumption
from .operators import (face_average, face_inner_sum, gradient, integrate,
                        upwind_face_flux, velocity_laplacian)
from .reductions import tree_sum
from .runner import Trajectory
from .solver import SolverState, chemotactic_face_flux


@dataclass(frozen=True)
class WeakResidualReport:
    """Signed residual (LHS - RHS) of each identity for one test function."""

    test_name: str
    density: float
    solute: float
    velocity: float

    def as_tuple(self):
        return (self.density, self.solute, self.velocity)


class TestFunction:
    """Smooth space-time test data sampled on the grid.

    ``scalar(mesh, t)`` and ``scalar_dt`` evaluate the scalar test
    function and its time derivative on cell centers; ``vector`` and
    ``vector_dt`` evaluate the solenoidal test field per face component.
    ``t_support_end`` bounds the temporal support; the residual
    evaluator rejects trajectories that end inside the support.
    """

    def __init__(self, name, t_support_end, scalar, scalar_dt, vector, vector_dt):
        self.name = name
        self.t_support_end = t_support_end
        self._scalar = scalar
        self._scalar_dt = scalar_dt
        self._vector = vector
        self._vector_dt = vector_dt

    def scalar(self, grid: GridSpec, t: float) -> np.ndarray:
        return self._scalar(grid.center_mesh(), t)

    def scalar_dt(self, grid: GridSpec, t: float) -> np.ndarray:
        return self._scalar_dt(grid.center_mesh(), t)

    def vector(self, grid: GridSpec, t: float):
        return tuple(self._vector(grid.face_center_mesh(a), t, a)
                     for a in range(grid.dim))

    def vector_dt(self, grid: GridSpec, t: float):
        return tuple(self._vector_dt(grid.face_center_mesh(a), t, a)
                     for a in range(grid.dim))


def _time_bump(t, t_end, power=4):
    """C^(power-1) bump on [0, t_end), equal to 1 at t = 0."""
    tau = t / t_end
    if tau >= 1.0:
        return 0.0, 0.0
    v = (1.0 - tau * tau) ** power
    dv = -2.0 * power * tau * (1.0 - tau * tau) ** (power - 1) / t_end
    return v, dv


def _stream_bump(xi):
    """xi^3 (1-xi)^3 profile, two vanishing derivatives at both walls."""
    return xi ** 3 * (1.0 - xi) ** 3


def _stream_bump_d(xi):
    return 3.0 * xi ** 2 * (1.0 - xi) ** 2 * (1.0 - 2.0 * xi)


class _Stream:
    """Compactly supported stream shape ``B(x) B(y) w(x, y)``.

    The weight ``w`` (affine) varies across the battery so the velocity
    test fields are not accidentally orthogonal to symmetric flows.
    """

    def __init__(self, w0, wx, wy):
        self.w0, self.wx, self.wy = w0, wx, wy

    def value(self, xi_x, xi_y):
        w = self.w0 + self.wx * xi_x + self.wy * xi_y
        return _stream_bump(xi_x) * _stream_bump(xi_y) * w

    def dx(self, xi_x, xi_y):
        w = self.w0 + self.wx * xi_x + self.wy * xi_y
        return (_stream_bump_d(xi_x) * _stream_bump(xi_y) * w
                + _stream_bump(xi_x) * _stream_bump(xi_y) * self.wx)

    def dy(self, xi_x, xi_y):
        w = self.w0 + self.wx * xi_x + self.wy * xi_y
        return (_stream_bump(xi_x) * _stream_bump_d(xi_y) * w
                + _stream_bump(xi_x) * _stream_bump(xi_y) * self.wy)


def standard_battery(grid: GridSpec, t_support_end: float):
    """Three fixed test functions: cosine, ramped exponential, offset cosine."""
    L = grid.lengths

    def make(name, shape, stream):
        def scalar(mesh, t):
            s, _ = _time_bump(t, t_support_end)
            return s * shape(mesh)

        def scalar_dt(mesh, t):
            _, ds = _time_bump(t, t_support_end)
            return ds * shape(mesh)

        def vector(mesh, t, axis):
            s, _ = _time_bump(t, t_support_end)
            return s * _solenoidal_component(mesh, axis, L, stream)

        def vector_dt(mesh, t, axis):
            _, ds = _time_bump(t, t_support_end)
            return ds * _solenoidal_component(mesh, axis, L, stream)

        return TestFunction(name, t_support_end, scalar, scalar_dt,
                            vector, vector_dt)

    def cosine(mesh):
        out = np.ones_like(mesh[0])
        for a, x in enumerate(mesh):
            out = out * np.cos(np.pi * x / L[a])
        return out

    def ramp(mesh):
        out = np.zeros_like(mesh[0])
        for a, x in enumerate(mesh):
            out = out + (0.5 + 0.5 * a) * x / L[a]
        return np.exp(out - 1.0)

    def offset_cosine(mesh):
        out = np.ones_like(mesh[0])
        for a, x in enumerate(mesh):
            out = out * np.cos(np.pi * (2 - a % 2) * x / L[a])
        return 1.0 + out

    return [
        make("cosine", cosine, _Stream(1.0, 0.0, 0.0)),
        make("ramp", ramp, _Stream(0.4, 1.3, 0.0)),
        make("offset-cosine", offset_cosine, _Stream(0.2, -0.6, 1.1)),
    ]


def _solenoidal_component(mesh, axis, L, stream):
    """Divergence-free field from a compactly supported stream function.

    2D: (d_y psi, -d_x psi).  3D: curl of (0, 0, psi(x, y) chi(z)), whose
    z component vanishes; chi is the wall bump along z.
    """
    dim = len(mesh)
    xi = [mesh[a] / L[a] for a in range(dim)]
    if dim == 2:
        if axis == 0:
            return stream.dy(xi[0], xi[1]) / L[1]
        return -stream.dx(xi[0], xi[1]) / L[0]
    if axis == 0:
        return stream.dy(xi[0], xi[1]) / L[1] * _stream_bump(xi[2])
    if axis == 1:
        return -stream.dx(xi[0], xi[1]) / L[0] * _stream_bump(xi[2])
    return np.zeros_like(mesh[0])


# --------------------------------------------------------------------------
# residual evaluation

def weak_residual(traj: Trajectory, grid: GridSpec, params: ModelParams,
                  test_fn: TestFunction) -> WeakResidualReport:
    """LHS - RHS of the three integral identities for one test function.

    The trajectory must extend past the temporal support of the test
    function; intervals are integrated by the midpoint rule with
    field averages at interval midpoints.  The density flux terms reuse
    the scheme's face constructions (power-gradient, donor drift, donor
    advection), the solute terms the scheme's gradients and consumption,
    and the velocity term pairs the trajectory with the discrete vector
    Laplacian of the sampled test field; the pressure never enters.
    """
    if len(traj) < 2:
        raise ValueError("trajectory needs at least two snapshots")
    if not (test_fn.t_support_end < traj.times[-1] + 1e-12):
        raise ValueError(
            f"test function support [0, {test_fn.t_support_end}) is not "
            f"compactly contained in the trajectory span "
            f"[0, {traj.times[-1]}]")
    vol = grid.cell_volume

    def cell_int(a, b):
        return vol * tree_sum(a * b)

    r_n = 0.0
    r_c = 0.0
    r_u = 0.0

    # initial terms
    phi0 = test_fn.scalar(grid, 0.0)
    r_n -= cell_int(traj.n[0], phi0)
    r_c -= cell_int(traj.c[0], phi0)
    zeta0 = test_fn.vector(grid, 0.0)
    for a in range(grid.dim):
        r_u -= vol * tree_sum(traj.u[0][a] * zeta0[a])

    gphi = params.grad_phi
    for k in range(len(traj) - 1):
        t0, t1 = traj.times[k], traj.times[k + 1]
        dt = t1 - t0
        if dt <= 0.0:
            raise ValueError("snapshot times must increase")
        tm = 0.5 * (t0 + t1)
        if tm >= test_fn.t_support_end:
            continue
        n_mid = 0.5 * (traj.n[k] + traj.n[k + 1])
        c_mid = 0.5 * (traj.c[k] + traj.c[k + 1])
        u_mid = tuple(0.5 * (traj.u[k][a] + traj.u[k + 1][a])
                      for a in range(grid.dim))
        n_f = ScalarField(grid, n_mid)
        c_f = ScalarField(grid, c_mid)
        u_f = FaceVectorField(grid, u_mid)
        state = SolverState(tm, 0, n_f, c_f, u_f, ScalarField(grid))

        phi_t = test_fn.scalar_dt(grid, tm)
        phi = ScalarField(grid, test_fn.scalar(grid, tm))
        gphi_faces = gradient(phi)

        # density identity
        r_n -= dt * cell_int(n_mid, phi_t)
        diff_flux = gradient(ScalarField(grid, (n_mid + params.eps) ** params.m))
        chemo = chemotactic_face_flux(state, params)
        adv = upwind_face_flux(n_f, u_f)
        rhs = (-face_inner_sum(diff_flux, gphi_faces)
               + face_inner_sum(chemo, gphi_faces)
               + face_inner_sum(adv, gphi_faces))
        r_n -= dt * rhs

        # solute identity
        r_c -= dt * cell_int(c_mid, phi_t)
        cons = n_mid * consumption(c_mid, params)
        c_adv = upwind_face_flux(c_f, u_f)
        rhs = (-face_inner_sum(gradient(c_f), gphi_faces)
               - cell_int(cons, phi.values)
               + face_inner_sum(c_adv, gphi_faces))
        r_c -= dt * rhs

        # velocity identity (pressure-free)
        zeta_t = test_fn.vector_dt(grid, tm)
        zeta = FaceVectorField(grid, test_fn.vector(grid, tm))
        lap_zeta = velocity_laplacian(zeta)
        rhs = face_inner_sum(u_f, lap_zeta)
        for a in range(grid.dim):
            nface = face_average(n_f, a)
            rhs += vol * tree_sum(nface * gphi[a] * zeta.components[a])
            r_u -= dt * vol * tree_sum(u_mid[a] * zeta_t[a])
        r_u -= dt * rhs

    return WeakResidualReport(test_fn.name, r_n, r_c, r_u)


def battery_residuals(traj: Trajectory, grid: GridSpec, params: ModelParams,
                      battery=None):
    """Reports for every battery member plus the per-identity maxima."""
    if battery is None:
        battery = standard_battery(grid, 0.8 * traj.times[-1])
    reports = [weak_residual(traj, grid, params, fn) for fn in battery]
    worst = {
        "density": max(abs(r.density) for r in reports),
        "solute": max(abs(r.solute) for r in reports),
        "velocity": max(abs(r.velocity) for r in reports),
    }
    return reports, worst
