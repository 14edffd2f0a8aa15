"""Numerical laboratory for a chemotaxis-Stokes system.

A box-domain MAC-grid solver for the coupled cell-density / solute /
Stokes-flow system with porous-medium diffusion and tensor-valued
(rotational) chemotactic sensitivity, together with the verification
harness for its conservation, extremum, energy, and weak-form
properties, and the exponent-feasibility algebra that locates the
critical diffusion threshold.
"""

from .feasibility import (FeasibilityQuery, WitnessResult, constraints,
                          find_witness, gn_alpha, m_star, m_threshold)
from .grid import FaceVectorField, GridSpec, ScalarField
from .invariants import (InvariantRow, check_divergence, check_mass,
                         check_max_principle, check_positivity,
                         energy_functional, odi_monitor)
from .model import ModelParams, consumption, rho_eps, sensitivity_tensor
from .operators import (divergence, gradient, integrate, laplacian,
                        reduce_extrema)
from .runner import RunResult, Trajectory, resume, run
from .solver import (BlowUpError, SolverOptions, SolverState, StepRejected,
                     advance, cfl_dt, chemotactic_face_flux, initial_state,
                     step_c, step_n, stokes_step)
from .weakform import TestFunction, WeakResidualReport, weak_residual

__version__ = "0.1.0"

__all__ = [
    "FaceVectorField", "FeasibilityQuery", "GridSpec", "InvariantRow",
    "ModelParams", "RunResult", "ScalarField", "SolverOptions", "SolverState",
    "StepRejected", "BlowUpError", "TestFunction", "Trajectory",
    "WeakResidualReport", "WitnessResult", "advance", "cfl_dt",
    "chemotactic_face_flux", "check_divergence", "check_mass",
    "check_max_principle", "check_positivity", "constraints", "consumption",
    "divergence", "energy_functional", "find_witness", "gn_alpha", "gradient",
    "initial_state", "integrate", "laplacian", "m_star", "m_threshold",
    "odi_monitor", "reduce_extrema", "resume", "rho_eps", "run",
    "sensitivity_tensor", "step_c", "step_n", "stokes_step", "weak_residual",
]
