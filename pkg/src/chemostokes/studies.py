"""Refinement studies with independent closed-form oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, ScalarField
from .initial import zero_velocity
from .model import ModelParams
from .runner import run
from .scenarios import diffusion_only_setup, heat_exact, smoke_setup
from .solver import SolverOptions, initial_state
from .weakform import battery_residuals, standard_battery


@dataclass(frozen=True)
class StudyResult:
    name: str
    resolutions: tuple
    errors: tuple
    orders: tuple

    @property
    def fitted_order(self) -> float:
        """Least-squares slope of log2(error) against log2(h)."""
        x = np.log2([1.0 / r for r in self.resolutions])
        y = np.log2(self.errors)
        slope = np.polyfit(x, y, 1)[0]
        return float(slope)

    def csv(self) -> str:
        lines = ["resolution,error,order"]
        for i, (r, e) in enumerate(zip(self.resolutions, self.errors)):
            order = repr(self.orders[i - 1]) if i > 0 else ""
            lines.append(f"{r},{repr(e)},{order}")
        return "\n".join(lines) + "\n"


def _pairwise_orders(errors):
    return tuple(math.log2(a / b) for a, b in zip(errors, errors[1:]))


# --------------------------------------------------------------------------
# porous-medium self-similar profile (quadratic diffusion, 1D)

def barenblatt_profile(x, t, total_height: float = 0.5):
    """Self-similar quadratic-diffusion solution in one dimension.

    ``n(x, t) = t**(-1/3) * max(C - xi^2 / 12, 0)`` with ``xi = x / t**(1/3)``
    and ``C = total_height``; an exact solution whose compact support
    spreads like ``t**(1/3)``.
    """
    xi = np.asarray(x) / t ** (1.0 / 3.0)
    return np.maximum(total_height - xi * xi / 12.0, 0.0) / t ** (1.0 / 3.0)


def barenblatt_study(resolutions=(64, 128, 256), safety: float = 0.85,
                     t_origin: float = 1.0, t_final: float = 2.0,
                     height: float = 0.5) -> StudyResult:
    """March the sampled profile and compare against its own future.

    One-dimensional dynamics realized on a 2D strip (4 uniform rows);
    cross-row fluxes vanish identically.  The error is the volume-weighted
    L1 distance to the exact profile at the final time.
    """
    errors = []
    for nx in resolutions:
        grid = GridSpec(2, (nx, 4), (8.0, 8.0 * 4 / nx))
        params = ModelParams(m=2.0, l=2.5, eps=0.0, alpha_s=1.0, beta_s=0.0,
                             s_law="constant", s0=0.0, f_law="linear",
                             grav=(0.0, 0.0))
        opts = SolverOptions(safety=safety, t_end=t_final - t_origin,
                             snap_interval=0.0)
        x = grid.centers(0) - 4.0
        profile = barenblatt_profile(x, t_origin, height)
        n0 = ScalarField(grid, np.repeat(profile[:, None], 4, axis=1))
        state = initial_state(grid, n0, ScalarField(grid), zero_velocity(grid))
        result = run(state, params, opts)
        exact = barenblatt_profile(x, t_origin + result.state.t, height)
        diff = np.abs(result.state.n.values - exact[:, None])
        errors.append(float(np.sum(diff) * grid.cell_volume))
    return StudyResult("barenblatt", tuple(resolutions), tuple(errors),
                       _pairwise_orders(errors))


def heat_study(resolutions=(32, 64, 128), t_end: float = 0.1,
               amplitude: float = 0.5) -> StudyResult:
    """Solute-only diffusion against the closed-form cosine decay."""
    errors = []
    for nx in resolutions:
        state, params, opts = diffusion_only_setup(nx, amplitude, t_end)
        result = run(state, params, opts)
        exact = heat_exact(result.state.grid, amplitude, result.state.t)
        diff = np.abs(result.state.c.values - exact)
        errors.append(float(np.sum(diff) * result.state.grid.cell_volume))
    return StudyResult("heat", tuple(resolutions), tuple(errors),
                       _pairwise_orders(errors))


@dataclass(frozen=True)
class ResidualStudyResult:
    resolutions: tuple
    worst: tuple  # dict per resolution
    ratios: dict

    def csv(self) -> str:
        lines = ["resolution,density,solute,velocity"]
        for r, w in zip(self.resolutions, self.worst):
            lines.append(f"{r},{repr(w['density'])},{repr(w['solute'])},"
                         f"{repr(w['velocity'])}")
        lines.append("ratio,%s,%s,%s" % (repr(self.ratios["density"]),
                                         repr(self.ratios["solute"]),
                                         repr(self.ratios["velocity"])))
        return "\n".join(lines) + "\n"


def weak_residual_study(resolutions=(32, 64), t_end: float = 1.0,
                        base_snap: float = 0.05) -> ResidualStudyResult:
    """Residual decay of the three integral identities under refinement.

    The snapshot interval scales inversely with resolution so space and
    time refine together; the battery support ends at 0.8 of the horizon.
    """
    worst = []
    for nx in resolutions:
        snap = base_snap * resolutions[0] / nx
        state, params, opts = smoke_setup(cells=nx, t_end=t_end,
                                          snap_interval=snap)
        result = run(state, params, opts, collect=True)
        battery = standard_battery(state.grid, 0.8 * t_end)
        _, w = battery_residuals(result.trajectory, state.grid, params, battery)
        worst.append(w)
    ratios = {key: worst[0][key] / worst[-1][key]
              for key in ("density", "solute", "velocity")}
    return ResidualStudyResult(tuple(resolutions), tuple(worst), ratios)


STUDIES = {
    "barenblatt": barenblatt_study,
    "heat": heat_study,
    "weak-residual": weak_residual_study,
}


def run_study(name: str):
    if name not in STUDIES:
        raise ValueError(
            f"unknown study {name!r}; available: {', '.join(sorted(STUDIES))}")
    return STUDIES[name]()
