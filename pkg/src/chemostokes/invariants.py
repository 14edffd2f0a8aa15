"""Quantitative run diagnostics: conservation, extremum bounds, energy.

Every accepted step contributes one :class:`InvariantRow`; the checks
here grade a whole series.  The energy/dissipation pair is a monitored
diagnostic for the damping structure of the system, never a hard gate:
it is only meaningful above the feasibility threshold, and below it the
monitor simply reports what it saw.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels2d as k2
from .reductions import tree_sum
from .solver import SolverState

CSV_HEADER = "step,t,dt,mass,n_min,n_max,c_min,c_max,div_u_inf,energy,dissipation"


@dataclass(frozen=True)
class InvariantRow:
    step: int
    t: float
    dt: float
    mass: float
    n_min: float
    n_max: float
    c_min: float
    c_max: float
    div_u_inf: float
    energy: float
    dissipation: float

    def csv(self) -> str:
        return ",".join([
            str(self.step), repr(self.t), repr(self.dt), repr(self.mass),
            repr(self.n_min), repr(self.n_max), repr(self.c_min),
            repr(self.c_max), repr(self.div_u_inf), repr(self.energy),
            repr(self.dissipation),
        ])


@dataclass(frozen=True)
class CheckVerdict:
    check: str
    passed: bool
    worst_value: float
    location: str

    def to_json(self) -> str:
        return json.dumps({
            "check": self.check,
            "pass": self.passed,
            "worst_value": self.worst_value,
            "location": self.location,
        }, sort_keys=True)


# --------------------------------------------------------------------------
# energy / dissipation functionals

def energy_functional(state: SolverState, p_exp: float, q_exp: float,
                      m: float, eps: float = 0.0):
    """Energy ``y`` and dissipation ``D`` of the monitored functional.

    y = int (n+eps)^p + int |grad c|^(2q) + int |grad u|^2
    D = int |grad (n+eps)^((m+p-1)/2)|^2
        + int |grad c|^(2q-2) |D2 c|^2 + int |lap_h u|^2

    computed with the discrete face gradients, mirror-ghost Hessian, and
    the no-slip vector Laplacian.  Both are nonnegative; D vanishes only
    for constant n, constant c, zero u.
    """
    if not (p_exp > 1.0 and q_exp > 1.0):
        raise ValueError("energy exponents must exceed 1")
    parts = energy_parts(state, p_exp, q_exp, m, eps)
    y = parts["y_n"] + parts["y_c"] + parts["y_u"]
    d = parts["d_n"] + parts["d_c"] + parts["d_u"]
    return y, d


def energy_parts(state: SolverState, p_exp: float, q_exp: float,
                 m: float, eps: float = 0.0) -> dict:
    g = state.grid
    if g.dim == 2:
        N0, N1 = g.cells
        y_n = np.empty((N0, N1))
        y_c = np.empty((N0, N1))
        d_c = np.empty((N0, N1))
        dnx = np.empty((N0 + 1, N1))
        dny = np.empty((N0, N1 + 1))
        gux_n = np.empty((N0, N1))
        gux_t = np.empty((N0 + 1, N1 + 1))
        guy_n = np.empty((N0, N1))
        guy_t = np.empty((N0 + 1, N1 + 1))
        lux = np.empty((N0 + 1, N1))
        luy = np.empty((N0, N1 + 1))
        k2.energy_integrands_2d(
            state.n.values, state.c.values,
            state.u.components[0], state.u.components[1],
            eps, p_exp, q_exp, m, g.spacing[0], g.spacing[1],
            y_n, y_c, d_c, dnx, dny, gux_n, gux_t, guy_n, guy_t, lux, luy)
        vol = g.cell_volume
        return {
            "y_n": vol * tree_sum(y_n),
            "y_c": vol * tree_sum(y_c),
            "y_u": vol * (tree_sum(gux_n) + tree_sum(gux_t)
                          + tree_sum(guy_n) + tree_sum(guy_t)),
            "d_n": vol * (tree_sum(dnx) + tree_sum(dny)),
            "d_c": vol * tree_sum(d_c),
            "d_u": vol * (tree_sum(lux) + tree_sum(luy)),
        }
    return _energy_parts_generic(state, p_exp, q_exp, m, eps)


def _energy_parts_generic(state: SolverState, p_exp, q_exp, m, eps) -> dict:
    """Dimension-generic NumPy evaluation of the same integrands."""
    from .operators import velocity_laplacian

    g = state.grid
    vol = g.cell_volume
    n = state.n.values
    c = state.c.values
    y_n = vol * tree_sum((n + eps) ** p_exp)

    gbar = [_cell_avg_gradient(c, g, a) for a in range(g.dim)]
    g2 = np.zeros(g.cells)
    for arr in gbar:
        g2 += arr * arr
    y_c = vol * tree_sum(g2 ** q_exp)

    h2sum = np.zeros(g.cells)
    for a in range(g.dim):
        h2sum += _second_difference(c, g, a) ** 2
        for b in range(g.dim):
            if b != a:
                h2sum += _even_central_difference(gbar[a], g, b) ** 2
    d_c = vol * tree_sum(g2 ** (q_exp - 1.0) * h2sum)

    sexp = 0.5 * (m + p_exp - 1.0)
    phi = (n + eps) ** sexp
    d_n = 0.0
    for a in range(g.dim):
        h = g.spacing[a]
        lo = [slice(None)] * g.dim
        lo[a] = slice(None, -1)
        hi = [slice(None)] * g.dim
        hi[a] = slice(1, None)
        grad = (phi[tuple(hi)] - phi[tuple(lo)]) / h
        d_n += vol * tree_sum(grad * grad)

    y_u = 0.0
    for a in range(g.dim):
        arr = state.u.components[a]
        for b in range(g.dim):
            h = g.spacing[b]
            if b == a:
                lo = [slice(None)] * g.dim
                lo[a] = slice(None, -1)
                hi = [slice(None)] * g.dim
                hi[a] = slice(1, None)
                samp = (arr[tuple(hi)] - arr[tuple(lo)]) / h
            else:
                pad_lo = -np.take(arr, [0], axis=b)
                pad_hi = -np.take(arr, [-1], axis=b)
                ext = np.concatenate([pad_lo, arr, pad_hi], axis=b)
                lo = [slice(None)] * g.dim
                lo[b] = slice(None, -1)
                hi = [slice(None)] * g.dim
                hi[b] = slice(1, None)
                samp = (ext[tuple(hi)] - ext[tuple(lo)]) / h
            y_u += vol * tree_sum(samp * samp)

    lap = velocity_laplacian(state.u)
    d_u = 0.0
    for arr in lap.components:
        d_u += vol * tree_sum(arr * arr)
    return {"y_n": y_n, "y_c": y_c, "y_u": y_u,
            "d_n": d_n, "d_c": d_c, "d_u": d_u}


def _cell_avg_gradient(c, g, axis):
    """Average of the two adjacent face gradients; wall faces count as 0."""
    h = g.spacing[axis]
    N = g.cells[axis]
    face = np.zeros(g.face_shape(axis))
    interior = [slice(None)] * g.dim
    interior[axis] = slice(1, -1)
    lo = [slice(None)] * g.dim
    lo[axis] = slice(None, -1)
    hi = [slice(None)] * g.dim
    hi[axis] = slice(1, None)
    face[tuple(interior)] = (c[tuple(hi)] - c[tuple(lo)]) / h
    return 0.5 * (face[tuple(lo)] + face[tuple(hi)])


def _second_difference(c, g, axis):
    h2 = g.spacing[axis] ** 2
    lo = np.take(c, [0], axis=axis)
    hi = np.take(c, [-1], axis=axis)
    ext = np.concatenate([lo, c, hi], axis=axis)
    a = [slice(None)] * g.dim
    a[axis] = slice(None, -2)
    b = [slice(None)] * g.dim
    b[axis] = slice(1, -1)
    d = [slice(None)] * g.dim
    d[axis] = slice(2, None)
    return (ext[tuple(d)] - 2.0 * ext[tuple(b)] + ext[tuple(a)]) / h2


def _even_central_difference(f, g, axis):
    h = g.spacing[axis]
    lo = np.take(f, [0], axis=axis)
    hi = np.take(f, [-1], axis=axis)
    ext = np.concatenate([lo, f, hi], axis=axis)
    a = [slice(None)] * g.dim
    a[axis] = slice(None, -2)
    d = [slice(None)] * g.dim
    d[axis] = slice(2, None)
    return (ext[tuple(d)] - ext[tuple(a)]) / (2.0 * h)


# --------------------------------------------------------------------------
# series checks

def check_mass(rows, tol_per_1000: float = 1e-12) -> CheckVerdict:
    """Relative drift of the density integral, budgeted per 1000 steps."""
    if len(rows) < 2:
        raise ValueError("need at least two invariant rows")
    m0 = rows[0].mass
    scale = abs(m0) if m0 != 0.0 else 1.0
    worst = 0.0
    where = "step 0"
    passed = True
    for r in rows[1:]:
        drift = abs(r.mass - m0) / scale
        budget = tol_per_1000 * max(1.0, (r.step - rows[0].step) / 1000.0)
        if drift > worst:
            worst = drift
            where = f"step {r.step}"
        if drift > budget:
            passed = False
    return CheckVerdict("mass-conservation", passed, worst, where)


def max_mass_drift(rows) -> float:
    m0 = rows[0].mass
    scale = abs(m0) if m0 != 0.0 else 1.0
    return max(abs(r.mass - m0) / scale for r in rows[1:])


def check_max_principle(rows, c0_max: float) -> CheckVerdict:
    """Solute stays within [0, max(c0)] up to roundoff slack."""
    worst = 0.0
    where = ""
    passed = True
    for r in rows:
        over = r.c_max - c0_max * (1.0 + 1e-12)
        under = -1e-12 - r.c_min
        excess = max(over, under)
        if excess > worst:
            worst = excess
            where = f"step {r.step}"
        if excess > 0.0:
            passed = False
    return CheckVerdict("max-principle", passed, worst, where or "step 0")


def check_positivity(rows) -> CheckVerdict:
    worst = min(r.n_min for r in rows)
    where = f"step {min(rows, key=lambda r: r.n_min).step}"
    return CheckVerdict("n-positivity", worst >= 0.0, worst, where)


def check_divergence(rows, proj_tol: float = 1e-8) -> CheckVerdict:
    worst = max(r.div_u_inf for r in rows)
    where = f"step {max(rows, key=lambda r: r.div_u_inf).step}"
    return CheckVerdict("divergence-free", worst <= proj_tol, worst, where)


@dataclass(frozen=True)
class OdiVerdict:
    bounded: bool
    c_damp: float
    c_src: float
    sup_y: float
    final_half_max: float
    final_half_ref: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def odi_monitor(rows, min_rows: int = 10) -> OdiVerdict:
    """Fit the smallest single constant C with dy/dt + D/C <= C.

    Uses centered differences of the reported energy.  The boundedness
    verdict demands a finite energy sup and no doubling over the final
    half of the run.  This is a diagnostic consistent with the damping
    inequality, not a proof; below the feasibility threshold it carries
    no pass/fail meaning.
    """
    if len(rows) < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {len(rows)}")
    t = np.array([r.t for r in rows])
    y = np.array([r.energy for r in rows])
    d = np.array([r.dissipation for r in rows])
    c_fit = 0.0
    for k in range(1, len(rows) - 1):
        span = t[k + 1] - t[k - 1]
        if span <= 0.0:
            continue
        ydot = (y[k + 1] - y[k - 1]) / span
        # smallest C with ydot + D/C <= C, i.e. C^2 - ydot C - D >= 0
        root = 0.5 * (ydot + math.sqrt(ydot * ydot + 4.0 * max(d[k], 0.0)))
        c_fit = max(c_fit, root)
    sup_y = float(np.max(y))
    mid_t = 0.5 * (t[0] + t[-1])
    mid_idx = int(np.argmin(np.abs(t - mid_t)))
    ref = float(y[mid_idx])
    final_max = float(np.max(y[mid_idx:]))
    bounded = bool(np.all(np.isfinite(y))) and final_max <= 2.0 * max(ref, 1e-300)
    return OdiVerdict(bounded, c_fit, c_fit, sup_y, final_max, ref)
