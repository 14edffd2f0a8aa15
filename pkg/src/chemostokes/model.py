"""Constitutive ingredients of the coupled cell-solute-flow model.

Collects every physical knob a run needs: the nonlinear diffusion
exponent ``m``, the sensitivity exponent ``l``, the boundary cutoff
scale ``eps``, the tensor mixing weights, the solute response law, the
consumption law, and the constant gravitational pull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec

S_LAWS = ("constant", "affine")
F_LAWS = ("linear", "saturating")


@dataclass(frozen=True)
class ModelParams:
    """Immutable physical parameter set.

    ``grav`` is the constant pull vector ``g``; the potential gradient
    used in the momentum forcing is ``grad_phi = -g`` everywhere.
    ``rotation_axis`` only matters in 3D, where the rotational part of
    the sensitivity tensor is the cross-product generator about it.
    """

    m: float = 2.0
    l: float = 2.5
    eps: float = 0.01
    alpha_s: float = 1.0
    beta_s: float = 0.0
    s_law: str = "constant"
    s0: float = 1.0
    f_law: str = "linear"
    grav: tuple[float, ...] = (0.0, 0.0)
    rotation_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not (self.m > 1.0):
            raise ValueError(f"diffusion exponent m must exceed 1, got {self.m}")
        if not (self.l > 2.0):
            raise ValueError(f"sensitivity exponent l must exceed 2, got {self.l}")
        if not (0.0 <= self.eps < 1.0):
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")
        if self.s0 < 0.0:
            raise ValueError(f"s0 must be nonnegative, got {self.s0}")
        if self.s_law not in S_LAWS:
            raise ValueError(f"unknown s_law {self.s_law!r}, choose from {S_LAWS}")
        if self.f_law not in F_LAWS:
            raise ValueError(f"unknown f_law {self.f_law!r}, choose from {F_LAWS}")
        if self.alpha_s == 0.0 and self.beta_s == 0.0:
            raise ValueError("alpha_s and beta_s cannot both vanish")
        object.__setattr__(self, "grav", tuple(float(v) for v in self.grav))
        if len(self.grav) not in (2, 3):
            raise ValueError("grav must be a 2- or 3-vector")
        axis = np.asarray(self.rotation_axis, dtype=float)
        if axis.shape != (3,):
            raise ValueError("rotation_axis must be a 3-vector")
        norm = float(np.linalg.norm(axis))
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(
                f"rotation_axis must be a unit vector, |axis| = {norm:.3e}"
            )
        object.__setattr__(self, "rotation_axis", tuple(float(v) for v in axis / norm))

    @property
    def dim(self) -> int:
        return len(self.grav)

    @property
    def grad_phi(self) -> tuple[float, ...]:
        return tuple(-g for g in self.grav)

    def s_tilde(self, c):
        """Nondecreasing solute response; ``constant`` or ``affine``."""
        if self.s_law == "constant":
            return self.s0 * np.ones_like(np.asarray(c, dtype=float))
        return self.s0 * (1.0 + np.asarray(c, dtype=float))

    def mix_matrix(self) -> np.ndarray:
        """Normalized tensor direction ``(a*I + b*R) / ||a*I + b*R||_F``.

        ``R`` is the quarter-turn in 2D and the cross-product generator
        about ``rotation_axis`` in 3D.  Normalizing makes the Frobenius
        norm bound on the full tensor an exact interior equality, which
        is the hardest admissible case for the solver.
        """
        return mix_matrix(self.dim, self.alpha_s, self.beta_s, self.rotation_axis)


def mix_matrix(dim, alpha_s, beta_s, rotation_axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    if alpha_s == 0.0 and beta_s == 0.0:
        raise ValueError("degenerate mix: alpha_s = beta_s = 0 cannot be normalized")
    if dim == 2:
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        mat = alpha_s * np.eye(2) + beta_s * rot
    elif dim == 3:
        a1, a2, a3 = rotation_axis
        rot = np.array(
            [
                [0.0, -a3, a2],
                [a3, 0.0, -a1],
                [-a2, a1, 0.0],
            ]
        )
        mat = alpha_s * np.eye(3) + beta_s * rot
    else:
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    return mat / np.linalg.norm(mat)


def smoothstep(s):
    """Quintic smoothstep: 0 for s <= 0, 1 for s >= 1, C^2 monotone between."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0)


def rho_eps(x, grid: GridSpec, eps: float):
    """Boundary cutoff profile, exactly 0 on the boundary, 1 deep inside.

    Returns ``smoothstep(d(x) / (eps * L_min))`` where ``d`` is the
    distance to the box boundary.  At a fixed interior point the value is
    nondecreasing as ``eps`` decreases, approaching 1.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    d = grid.boundary_distance(x)
    scale = eps * min(grid.lengths)
    return smoothstep(np.asarray(d) / scale)


def boundary_cutoff(x, grid: GridSpec, eps: float):
    """Cutoff used by the solver; handles the un-regularized limit.

    For ``eps > 0`` this is :func:`rho_eps`.  At ``eps = 0`` it takes the
    pointwise limit: 1 at interior points, 0 on the boundary, so the
    tensor still vanishes there.
    """
    if eps > 0.0:
        return rho_eps(x, grid, eps)
    d = np.asarray(grid.boundary_distance(x))
    return np.where(d > 0.0, 1.0, 0.0)


def sensitivity_magnitude(n, c, params: ModelParams):
    """Scalar factor ``n**(l-2) * s_tilde(c)`` of the tensor, cutoff excluded."""
    n = np.asarray(n, dtype=float)
    return n ** (params.l - 2.0) * params.s_tilde(c)


def sensitivity_tensor(x, n: float, c: float, params: ModelParams, grid: GridSpec) -> np.ndarray:
    """Full tensor at a point: ``cutoff(x) * n**(l-2) * s_tilde(c) * M``.

    ``M`` is the unit-Frobenius mix, so the Frobenius norm of the result
    equals ``cutoff * n**(l-2) * s_tilde(c)`` and never exceeds the
    cutoff-free magnitude.  Exactly zero for boundary points.
    """
    if not (np.isfinite(n) and np.isfinite(c)) or n < 0 or c < 0:
        raise ValueError(f"n and c must be finite and nonnegative, got n={n}, c={c}")
    rho = float(boundary_cutoff(x, grid, params.eps))
    mag = float(sensitivity_magnitude(n, c, params))
    return rho * mag * params.mix_matrix()


def consumption(c, params: ModelParams):
    """Solute uptake rate ``f(c)``; nonnegative with ``f(0) = 0``.

    ``linear``: f(c) = c.  ``saturating``: f(c) = c / (1 + c).
    """
    arr = np.asarray(c, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("consumption called with negative solute value")
    if params.f_law == "linear":
        out = arr
    else:
        out = arr / (1.0 + arr)
    return out if arr.ndim else float(out)
