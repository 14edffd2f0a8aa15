"""Conjugate-gradient solver for the cell-centered Neumann Poisson problem.

The pressure projection solves ``lap(psi) = b`` with zero-flux ghosts and
a mean-zero gauge.  Internally the sign-flipped (positive definite)
system is iterated with preconditioned CG; all dot products go through
the deterministic tree reduction.

The default preconditioner inverts the Laplacian exactly in the cosine
basis (the cell-centered zero-flux stencil is diagonal there), so CG
converges in one or two iterations while the CG loop still enforces the
residual bound independently.  ``preconditioner="none"`` runs plain CG.
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .grid import GridSpec
from .kernels2d import lap_cells_neumann_2d
from .kernels3d import lap_cells_neumann_3d
from .reductions import tree_dot, tree_sum


class PoissonDivergedError(RuntimeError):
    """CG failed to reach the requested residual within max_iters."""

    def __init__(self, iters: int, rel_residual: float):
        super().__init__(
            f"pressure CG did not converge: {iters} iterations, "
            f"relative residual {rel_residual:.3e}"
        )
        self.iters = iters
        self.rel_residual = rel_residual


class NeumannPoisson:
    """Solver bound to one grid; reusable across steps (warm starts)."""

    def __init__(self, grid: GridSpec, preconditioner: str = "dct"):
        if preconditioner not in ("dct", "none"):
            raise ValueError(f"unknown preconditioner {preconditioner!r}")
        self.grid = grid
        self.preconditioner = preconditioner
        # positive eigenvalues of -lap in the DCT-II basis
        lam = np.zeros(grid.cells)
        for a in range(grid.dim):
            N = grid.cells[a]
            h = grid.spacing[a]
            k = np.arange(N)
            lam_a = (2.0 - 2.0 * np.cos(np.pi * k / N)) / (h * h)
            shape = [1] * grid.dim
            shape[a] = N
            lam = lam + lam_a.reshape(shape)
        lam_flat = lam.copy()
        lam_flat.flat[0] = 1.0  # zero mode handled by gauge, avoid 0/0
        self._lam = lam_flat

    def neg_laplacian(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        g = self.grid
        if g.dim == 2:
            lap_cells_neumann_2d(x, g.spacing[0], g.spacing[1], out)
        else:
            lap_cells_neumann_3d(x, g.spacing[0], g.spacing[1], g.spacing[2], out)
        return -out

    def _apply_inverse(self, r: np.ndarray) -> np.ndarray:
        """Exact inverse of -lap on the mean-zero subspace via DCT-II."""
        rh = scipy.fft.dctn(r, type=2, norm="ortho", workers=1)
        rh /= self._lam
        rh.flat[0] = 0.0
        return scipy.fft.idctn(rh, type=2, norm="ortho", workers=1)

    def solve(self, b: np.ndarray, x0: np.ndarray | None = None,
              tol: float = 1e-10, max_iters: int = 500):
        """Solve ``lap(x) = b`` to ``||r||_2 <= tol * ||b||_2``.

        The mean of ``b`` (incompatible with the pure Neumann operator)
        is removed first.  Returns ``(x, iterations, rel_residual)``; the
        caller applies the mean-zero gauge to ``x``.
        """
        rhs = -(b - tree_sum(b) / b.size)
        bnorm = np.sqrt(tree_dot(rhs, rhs))
        if bnorm == 0.0:
            return np.zeros_like(b), 0, 0.0
        x = np.zeros_like(b) if x0 is None else x0.copy()
        r = rhs - self.neg_laplacian(x)
        rel = np.sqrt(tree_dot(r, r)) / bnorm
        if rel <= tol:
            return x, 0, rel
        if self.preconditioner == "dct":
            z = self._apply_inverse(r)
        else:
            z = r.copy()
        d = z.copy()
        rz = tree_dot(r, z)
        for it in range(1, max_iters + 1):
            q = self.neg_laplacian(d)
            dq = tree_dot(d, q)
            if dq <= 0.0:
                # search direction fell into the constant null space;
                # report non-convergence with the current residual
                break
            alpha = rz / dq
            x += alpha * d
            r -= alpha * q
            rel = np.sqrt(tree_dot(r, r)) / bnorm
            if rel <= tol:
                return x, it, rel
            if self.preconditioner == "dct":
                z = self._apply_inverse(r)
            else:
                z = r.copy()
            rz_new = tree_dot(r, z)
            beta = rz_new / rz
            rz = rz_new
            d = z + beta * d
        raise PoissonDivergedError(max_iters, rel)
