"""Explicit time integration of the regularized cell-solute-flow system.

One step advances, in this fixed order and always from beginning-of-step
fields: the cell density (flux-form porous diffusion + tensor drift +
advection), the solute (diffusion + upwind advection + consumption), and
the velocity (viscous prediction + buoyant forcing + pressure
projection).  The splitting is fully explicit and first order in time,
so every conservation or extremum property has a crisp stencil-level
justification and a violation points at a specific sub-step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels2d as k2
from . import kernels3d as k3
from .grid import FaceVectorField, GridSpec, ScalarField
from .model import ModelParams, boundary_cutoff
from .poisson import NeumannPoisson, PoissonDivergedError
from .reductions import tree_sum

NEG_TOL = 1e-12


class StepRejected(RuntimeError):
    """A sub-step produced an invalid field (CFL violation signal)."""

    def __init__(self, check: str, value: float, detail: str = ""):
        msg = f"step rejected by {check}: {value:.6e}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.check = check
        self.value = value
        self.detail = detail


class BlowUpError(RuntimeError):
    """Non-finite value appeared during time stepping."""

    def __init__(self, field: str, location: tuple, step: int):
        super().__init__(
            f"blow-up: non-finite {field} at cell {location}, step {step}"
        )
        self.field = field
        self.location = location
        self.step = step


@dataclass(frozen=True)
class SolverOptions:
    """Numerical knobs of a run; physical parameters live in ModelParams."""

    safety: float = 0.4
    t_end: float = 1.0
    snap_interval: float = 0.0  # 0 disables snapshots
    proj_tol: float = 1e-8
    max_cg_iters: int = 500
    energy_p: float = 2.0
    energy_q: float = 2.0
    preconditioner: str = "dct"

    def __post_init__(self):
        if self.safety <= 0.0:
            raise ValueError("safety must be positive")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        if self.snap_interval < 0.0:
            raise ValueError("snap_interval must be nonnegative")
        if self.proj_tol <= 0.0:
            raise ValueError("proj_tol must be positive")
        if self.energy_p <= 1.0 or self.energy_q <= 1.0:
            raise ValueError("energy exponents must exceed 1")


@dataclass
class StepInfo:
    dt: float
    div_u_inf: float
    cg_iters: int
    n_min: float
    n_max: float
    c_min: float
    c_max: float


@dataclass
class SolverState:
    """Fields at one time level."""

    t: float
    step: int
    n: ScalarField
    c: ScalarField
    u: FaceVectorField
    P: ScalarField
    info: StepInfo | None = None

    @property
    def grid(self) -> GridSpec:
        return self.n.grid

    def copy(self) -> "SolverState":
        return SolverState(self.t, self.step, self.n.copy(), self.c.copy(),
                           self.u.copy(), self.P.copy(), self.info)

    def validate(self, proj_tol: float = 1e-8) -> None:
        self.n.check_finite("n")
        self.c.check_finite("c")
        self.u.check_finite("u")
        self.P.check_finite("P")
        if float(np.min(self.n.values)) < -NEG_TOL:
            raise ValueError("n has negative entries")
        if float(np.min(self.c.values)) < -NEG_TOL:
            raise ValueError("c has negative entries")
        if self.u.boundary_normal_max() != 0.0:
            raise ValueError("u has nonzero boundary-normal entries")
        div = divergence_inf(self.u)
        if div > proj_tol:
            raise ValueError(f"div(u) = {div:.3e} exceeds {proj_tol:.1e}")
        mean_p = tree_sum(self.P.values) / self.P.values.size
        if abs(mean_p) > 1e-10 * (1.0 + float(np.max(np.abs(self.P.values)))):
            raise ValueError(f"pressure gauge broken: mean(P) = {mean_p:.3e}")


def initial_state(grid: GridSpec, n0: ScalarField, c0: ScalarField,
                  u0: FaceVectorField | None = None) -> SolverState:
    u0 = u0 if u0 is not None else FaceVectorField(grid)
    return SolverState(0.0, 0, n0.copy(), c0.copy(), u0.copy(),
                       ScalarField(grid))


# --------------------------------------------------------------------------
# cached per-(grid, params) machinery

@lru_cache(maxsize=32)
def _workspace(grid: GridSpec, params: ModelParams):
    rho = tuple(
        np.ascontiguousarray(_rho_on_faces(grid, params.eps, a))
        for a in range(grid.dim)
    )
    mix = np.ascontiguousarray(params.mix_matrix())
    return {"rho": rho, "mix": mix}


@lru_cache(maxsize=32)
def _poisson(grid: GridSpec, preconditioner: str) -> NeumannPoisson:
    return NeumannPoisson(grid, preconditioner)


def _rho_on_faces(grid: GridSpec, eps: float, axis: int) -> np.ndarray:
    mesh = grid.face_center_mesh(axis)
    pts = np.stack(mesh, axis=-1)
    return np.asarray(boundary_cutoff(pts, grid, eps), dtype=float)


def _chemo_velocity(state: SolverState, params: ModelParams):
    """Face-normal tensor drift arrays plus the max transport speed."""
    g = state.grid
    ws = _workspace(g, params)
    mix = ws["mix"]
    lm2 = params.l - 2.0
    s_code = k2.S_LAW_CONSTANT if params.s_law == "constant" else k2.S_LAW_AFFINE
    w = tuple(np.empty(g.face_shape(a)) for a in range(g.dim))
    if g.dim == 2:
        vmax = k2.chemo_velocity_2d(
            state.n.values, state.c.values,
            state.u.components[0], state.u.components[1],
            ws["rho"][0], ws["rho"][1],
            mix[0, 0], mix[0, 1], mix[1, 0], mix[1, 1],
            lm2, s_code, params.s0,
            g.spacing[0], g.spacing[1], w[0], w[1])
    else:
        vmax = k3.chemo_velocity_3d(
            state.n.values, state.c.values,
            state.u.components[0], state.u.components[1], state.u.components[2],
            ws["rho"][0], ws["rho"][1], ws["rho"][2],
            mix, lm2, s_code, params.s0,
            g.spacing[0], g.spacing[1], g.spacing[2], w[0], w[1], w[2])
    return w, float(vmax)


# --------------------------------------------------------------------------
# public single-purpose operations

def cfl_dt(state: SolverState, params: ModelParams, safety: float) -> float:
    """Stable explicit step size.

    ``safety * min(h^2 / (2 dim Dmax), h / (Vmax + tiny), h^2 / (2 dim))``
    with ``Dmax = m max(n+eps)^(m-1)`` the nonlinear diffusivity, ``Vmax``
    the largest face transport speed |u| + |S grad c|, and the last term
    the unit-diffusivity (solute and viscous) limit.  ``safety`` in
    (0, 1] is the stable regime; larger values are accepted and will
    typically end in step rejection.
    """
    g = state.grid
    nmax = float(np.max(state.n.values))
    if not np.isfinite(nmax):
        raise StepRejected("cfl-finite", nmax, "non-finite n")
    _, vmax = _chemo_velocity(state, params)
    if not np.isfinite(vmax):
        raise StepRejected("cfl-finite", vmax, "non-finite transport speed")
    h = g.min_spacing
    dmax = params.m * (nmax + params.eps) ** (params.m - 1.0)
    t_diff = h * h / (2.0 * g.dim * dmax) if dmax > 0.0 else np.inf
    t_adv = h / (vmax + 1e-30)
    t_unit = h * h / (2.0 * g.dim)
    return safety * min(t_diff, t_adv, t_unit)


def chemotactic_face_flux(state: SolverState, params: ModelParams) -> FaceVectorField:
    """Donor-cell tensor-drift flux ``n_upwind * (S grad c . normal)``.

    Boundary faces carry exactly zero: the cutoff vanishes there and the
    domain walls are no-flux.
    """
    g = state.grid
    w, _ = _chemo_velocity(state, params)
    F = tuple(np.zeros(g.face_shape(a)) for a in range(g.dim))
    if g.dim == 2:
        k2.donor_flux_2d(state.n.values, w[0], w[1], F[0], F[1])
    else:
        k3.donor_flux_3d(state.n.values, w[0], w[1], w[2], F[0], F[1], F[2])
    return FaceVectorField(g, F)


def _total_n_flux(state: SolverState, params: ModelParams, w):
    """Chemo + advective + (negative) diffusive flux of the density."""
    g = state.grid
    F = tuple(np.zeros(g.face_shape(a)) for a in range(g.dim))
    if params.m == 2.0:
        base = state.n.values + params.eps
        phi = base * base
    else:
        phi = (state.n.values + params.eps) ** params.m
    if g.dim == 2:
        k2.donor_flux_2d(state.n.values, w[0], w[1], F[0], F[1])
        k2.donor_flux_2d(state.n.values, state.u.components[0],
                         state.u.components[1], F[0], F[1])
        k2.subtract_gradient_2d(phi, g.spacing[0], g.spacing[1], F[0], F[1])
    else:
        k3.donor_flux_3d(state.n.values, w[0], w[1], w[2], F[0], F[1], F[2])
        k3.donor_flux_3d(state.n.values, state.u.components[0],
                         state.u.components[1], state.u.components[2],
                         F[0], F[1], F[2])
        k3.subtract_gradient_3d(phi, g.spacing[0], g.spacing[1], g.spacing[2],
                                F[0], F[1], F[2])
    return F


def _apply_n_update(state, F, dt):
    g = state.grid
    out = np.empty(g.cells)
    if g.dim == 2:
        nmin = k2.divergence_update_2d(state.n.values, F[0], F[1],
                                       g.spacing[0], g.spacing[1], dt, out)
    else:
        nmin = k3.divergence_update_3d(state.n.values, F[0], F[1], F[2],
                                       g.spacing[0], g.spacing[1], g.spacing[2],
                                       dt, out)
    return out, float(nmin)


def step_n(state: SolverState, params: ModelParams, dt: float) -> ScalarField:
    """Flux-form density update; conserves the discrete integral exactly.

    Requires ``dt <= cfl_dt(state, params, 1.0)``; a violation surfaces
    as a rejected negative minimum.
    """
    w, _ = _chemo_velocity(state, params)
    out, nmin = _apply_n_update(state, _total_n_flux(state, params, w), dt)
    if not np.all(np.isfinite(out)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(out))[0])
        raise BlowUpError("n", idx, state.step)
    if nmin < -NEG_TOL:
        raise StepRejected("n-positivity", nmin, "density went negative")
    return ScalarField(state.grid, out, state.n.units)


def step_c(state: SolverState, params: ModelParams, dt: float) -> ScalarField:
    """Solute update: diffusion, upwind advection, consumption."""
    g = state.grid
    out = np.empty(g.cells)
    f_code = k2.F_LAW_LINEAR if params.f_law == "linear" else k2.F_LAW_SATURATING
    if g.dim == 2:
        cmin, _ = k2.step_c_2d(state.c.values, state.n.values,
                               state.u.components[0], state.u.components[1],
                               g.spacing[0], g.spacing[1], dt, f_code, out)
    else:
        cmin, _ = k3.step_c_3d(state.c.values, state.n.values,
                               state.u.components[0], state.u.components[1],
                               state.u.components[2],
                               g.spacing[0], g.spacing[1], g.spacing[2],
                               dt, f_code, out)
    if not np.all(np.isfinite(out)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(out))[0])
        raise BlowUpError("c", idx, state.step)
    if cmin < -NEG_TOL:
        raise StepRejected("c-positivity", float(cmin), "solute went negative")
    return ScalarField(g, out, state.c.units)


def divergence_inf(u: FaceVectorField) -> float:
    g = u.grid
    out = np.empty(g.cells)
    if g.dim == 2:
        return float(k2.div_mac_2d(u.components[0], u.components[1],
                                   g.spacing[0], g.spacing[1], out))
    return float(k3.div_mac_3d(u.components[0], u.components[1], u.components[2],
                               g.spacing[0], g.spacing[1], g.spacing[2], out))


def stokes_step(state: SolverState, params: ModelParams, dt: float,
                opts: SolverOptions = SolverOptions()):
    """Viscous prediction, buoyant forcing, and pressure projection.

    Returns ``(u_new, P_new, cg_iters, div_inf)``.  The projection solves
    the Neumann Poisson problem to a relative residual of 1e-10 via CG
    (warm-started from the current pressure) and re-gauges the pressure
    to zero mean.
    """
    g = state.grid
    gp = params.grad_phi
    if len(gp) != g.dim:
        raise ValueError("grav dimension does not match the grid")
    ustar = tuple(np.empty(g.face_shape(a)) for a in range(g.dim))
    if g.dim == 2:
        k2.ustar_2d(state.u.components[0], state.u.components[1],
                    state.n.values, gp[0], gp[1],
                    g.spacing[0], g.spacing[1], dt, ustar[0], ustar[1])
    else:
        k3.ustar_3d(state.u.components[0], state.u.components[1],
                    state.u.components[2], state.n.values,
                    gp[0], gp[1], gp[2],
                    g.spacing[0], g.spacing[1], g.spacing[2], dt,
                    ustar[0], ustar[1], ustar[2])
    div = np.empty(g.cells)
    if g.dim == 2:
        k2.div_mac_2d(ustar[0], ustar[1], g.spacing[0], g.spacing[1], div)
    else:
        k3.div_mac_3d(ustar[0], ustar[1], ustar[2],
                      g.spacing[0], g.spacing[1], g.spacing[2], div)
    solver = _poisson(g, opts.preconditioner)
    try:
        psi, iters, _ = solver.solve(div / dt, x0=state.P.values,
                                     tol=1e-10, max_iters=opts.max_cg_iters)
    except PoissonDivergedError as exc:
        raise StepRejected("pressure-cg", exc.rel_residual,
                           f"no convergence in {exc.iters} iterations") from exc
    if g.dim == 2:
        k2.correct_velocity_2d(ustar[0], ustar[1], psi,
                               g.spacing[0], g.spacing[1], dt)
    else:
        k3.correct_velocity_3d(ustar[0], ustar[1], ustar[2], psi,
                               g.spacing[0], g.spacing[1], g.spacing[2], dt)
    u_new = FaceVectorField(g, ustar, state.u.units)
    div_inf = divergence_inf(u_new)
    if not np.isfinite(div_inf):
        for a, arr in enumerate(u_new.components):
            if not np.all(np.isfinite(arr)):
                idx = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
                raise BlowUpError(f"u[{a}]", idx, state.step)
    if div_inf > opts.proj_tol:
        raise StepRejected("divergence-free", div_inf,
                           f"exceeds proj_tol {opts.proj_tol:.1e}")
    P_new = psi - tree_sum(psi) / psi.size
    return u_new, ScalarField(g, P_new, state.P.units), iters, div_inf


def advance(state: SolverState, params: ModelParams,
            opts: SolverOptions = SolverOptions(),
            dt_max: float | None = None) -> SolverState:
    """One full explicit step with beginning-of-step couplings.

    Computes ``dt = cfl_dt`` (optionally clamped by ``dt_max`` so a run
    can land exactly on an output time), then applies the density,
    solute, and flow updates in that documented order, all reading the
    incoming fields.  Any rejection or blow-up raises with the sub-step
    diagnosis.
    """
    g = state.grid
    nmax = float(np.max(state.n.values))
    if not np.isfinite(nmax):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(state.n.values))[0])
        raise BlowUpError("n", idx, state.step)
    w, vmax = _chemo_velocity(state, params)
    if not np.isfinite(vmax):
        raise StepRejected("cfl-finite", vmax, "non-finite transport speed")
    h = g.min_spacing
    dmax = params.m * (nmax + params.eps) ** (params.m - 1.0)
    t_diff = h * h / (2.0 * g.dim * dmax) if dmax > 0.0 else np.inf
    dt = opts.safety * min(t_diff, h / (vmax + 1e-30), h * h / (2.0 * g.dim))
    if dt_max is not None and dt_max < dt:
        dt = dt_max
    if dt <= 0.0:
        raise StepRejected("cfl-dt", dt, "non-positive step size")

    n_arr, nmin = _apply_n_update(state, _total_n_flux(state, params, w), dt)
    if not np.all(np.isfinite(n_arr)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(n_arr))[0])
        raise BlowUpError("n", idx, state.step + 1)
    if nmin < -NEG_TOL:
        raise StepRejected("n-positivity", nmin, "density went negative")

    c_new = step_c(state, params, dt)
    u_new, P_new, iters, div_inf = stokes_step(state, params, dt, opts)

    info = StepInfo(dt=dt, div_u_inf=div_inf, cg_iters=iters,
                    n_min=nmin, n_max=float(np.max(n_arr)),
                    c_min=float(np.min(c_new.values)),
                    c_max=float(np.max(c_new.values)))
    return SolverState(state.t + dt, state.step + 1,
                       ScalarField(g, n_arr, state.n.units),
                       c_new, u_new, P_new, info)
