"""Discrete calculus on the MAC grid, dimension-generic NumPy reference.

These are the public operators the diagnostics and tests are written
against.  The time stepper uses fused compiled kernels for speed; unit
tests pin the kernels to these operators.

Conventions
-----------
* ``gradient``: component ``i`` on an interior face is the difference of
  the two adjacent cell values divided by the spacing.  Boundary faces
  follow the no-flux mirror ghost rule, so their normal entries are
  exactly zero.
* ``divergence``: per cell, sum over axes of (right face - left face)
  divided by the spacing.
* ``laplacian`` is literally ``divergence(gradient(f))`` so that the
  composition identity holds bitwise.
"""

from __future__ import annotations

import numpy as np

from .grid import FaceVectorField, ScalarField
from .reductions import tree_sum


def integrate(f: ScalarField) -> float:
    """Cell-volume weighted sum via the deterministic pairwise tree."""
    f.check_finite("integrate input")
    return f.grid.cell_volume * tree_sum(f.values)


def reduce_extrema(f: ScalarField) -> tuple[float, float]:
    """Exact (min, max) of the field values."""
    return float(np.min(f.values)), float(np.max(f.values))


def gradient(f: ScalarField) -> FaceVectorField:
    f.check_finite("gradient input")
    g = f.grid
    comps = []
    for a in range(g.dim):
        h = g.spacing[a]
        arr = np.zeros(g.face_shape(a))
        interior = [slice(None)] * g.dim
        interior[a] = slice(1, -1)
        left = [slice(None)] * g.dim
        left[a] = slice(None, -1)
        right = [slice(None)] * g.dim
        right[a] = slice(1, None)
        arr[tuple(interior)] = (f.values[tuple(right)] - f.values[tuple(left)]) / h
        comps.append(arr)
    return FaceVectorField(g, tuple(comps))


def divergence(F: FaceVectorField) -> ScalarField:
    F.check_finite("divergence input")
    g = F.grid
    out = np.zeros(g.cells)
    for a in range(g.dim):
        h = g.spacing[a]
        arr = F.components[a]
        left = [slice(None)] * g.dim
        left[a] = slice(None, -1)
        right = [slice(None)] * g.dim
        right[a] = slice(1, None)
        out += (arr[tuple(right)] - arr[tuple(left)]) / h
    return ScalarField(g, out)


def laplacian(f: ScalarField) -> ScalarField:
    """Composition ``divergence(gradient(f))``; the no-flux stencil."""
    return divergence(gradient(f))


def face_average(f: ScalarField, axis: int) -> np.ndarray:
    """Arithmetic mean of the two cells adjacent to each interior face.

    Boundary faces copy the single adjacent cell value.
    """
    g = f.grid
    out = np.zeros(g.face_shape(axis))
    interior = [slice(None)] * g.dim
    interior[axis] = slice(1, -1)
    left = [slice(None)] * g.dim
    left[axis] = slice(None, -1)
    right = [slice(None)] * g.dim
    right[axis] = slice(1, None)
    out[tuple(interior)] = 0.5 * (f.values[tuple(left)] + f.values[tuple(right)])
    first = [slice(None)] * g.dim
    first[axis] = 0
    last = [slice(None)] * g.dim
    last[axis] = -1
    out[tuple(first)] = np.take(f.values, 0, axis=axis)
    out[tuple(last)] = np.take(f.values, -1, axis=axis)
    return out


def upwind_face_flux(f: ScalarField, w: FaceVectorField) -> FaceVectorField:
    """Donor-cell flux ``f_upwind * w`` per face.

    The donor is the cell the face-normal speed points away from.
    Boundary faces keep whatever ``w`` carries there; transport fields in
    this package always carry zero on the boundary.
    """
    g = f.grid
    comps = []
    for a in range(g.dim):
        wa = w.components[a]
        out = np.zeros_like(wa)
        interior = [slice(None)] * g.dim
        interior[a] = slice(1, -1)
        left = [slice(None)] * g.dim
        left[a] = slice(None, -1)
        right = [slice(None)] * g.dim
        right[a] = slice(1, None)
        wi = wa[tuple(interior)]
        donor = np.where(wi > 0.0, f.values[tuple(left)], f.values[tuple(right)])
        out[tuple(interior)] = donor * wi
        comps.append(out)
    return FaceVectorField(g, tuple(comps))


def face_inner_sum(A: FaceVectorField, B: FaceVectorField) -> float:
    """Sum over all faces of ``A . B`` weighted by the cell volume.

    With this weight the discrete duality
    ``face_inner_sum(F, gradient(a)) == -integrate(a * divergence(F))``
    holds up to roundoff whenever ``F`` vanishes on boundary faces.
    """
    g = A.grid
    vol = g.cell_volume
    total = 0.0
    for a in range(g.dim):
        total += tree_sum(A.components[a] * B.components[a])
    return vol * total


def cell_gradient_magnitude_sq(f: ScalarField) -> np.ndarray:
    """Per-cell squared gradient magnitude.

    Per axis the two adjacent face-normal gradients are averaged, then the
    averages are squared and summed.
    """
    g = f.grid
    grad = gradient(f)
    out = np.zeros(g.cells)
    for a in range(g.dim):
        arr = grad.components[a]
        left = [slice(None)] * g.dim
        left[a] = slice(None, -1)
        right = [slice(None)] * g.dim
        right[a] = slice(1, None)
        avg = 0.5 * (arr[tuple(left)] + arr[tuple(right)])
        out += avg * avg
    return out


def velocity_laplacian(u: FaceVectorField) -> FaceVectorField:
    """Discrete vector Laplacian of a no-slip MAC velocity field.

    Along the normal axis the stored wall values (exactly zero) enter the
    stencil directly.  Along tangential axes the wall sits half a cell
    beyond the outermost sample and the mirror-odd ghost ``u_ghost = -u``
    enforces the no-slip value at the wall.  Boundary-face entries of the
    result are zero; the operator is symmetric under the face inner
    product, which the energy diagnostics rely on.
    """
    g = u.grid
    comps = []
    for a in range(g.dim):
        arr = u.components[a]
        out = np.zeros_like(arr)
        interior = [slice(None)] * g.dim
        interior[a] = slice(1, -1)
        acc = np.zeros(arr[tuple(interior)].shape)
        for b in range(g.dim):
            h2 = g.spacing[b] ** 2
            if b == a:
                mid = [slice(None)] * g.dim
                mid[a] = slice(1, -1)
                lo = [slice(None)] * g.dim
                lo[a] = slice(None, -2)
                hi = [slice(None)] * g.dim
                hi[a] = slice(2, None)
                acc += (
                    arr[tuple(hi)] - 2.0 * arr[tuple(mid)] + arr[tuple(lo)]
                ) / h2
            else:
                ghosted = _with_odd_ghosts(arr, b)
                mid = [slice(None)] * g.dim
                mid[b] = slice(1, -1)
                lo = [slice(None)] * g.dim
                lo[b] = slice(None, -2)
                hi = [slice(None)] * g.dim
                hi[b] = slice(2, None)
                second = (
                    ghosted[tuple(hi)] - 2.0 * ghosted[tuple(mid)] + ghosted[tuple(lo)]
                ) / h2
                sel = [slice(None)] * g.dim
                sel[a] = slice(1, -1)
                acc += second[tuple(sel)]
        out[tuple(interior)] = acc
        comps.append(out)
    return FaceVectorField(g, tuple(comps))


def _with_odd_ghosts(arr: np.ndarray, axis: int) -> np.ndarray:
    """Pad one mirror-odd ghost layer (no-slip wall) along ``axis``."""
    lo = -np.take(arr, [0], axis=axis)
    hi = -np.take(arr, [-1], axis=axis)
    return np.concatenate([lo, arr, hi], axis=axis)
