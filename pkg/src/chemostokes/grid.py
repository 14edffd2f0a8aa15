"""Staggered (MAC) grid containers.

Scalars (cell density, solute, pressure) live at cell centers; vector
fields (velocity, fluxes) live on cell faces, with component ``i`` stored
on faces whose normal points along axis ``i``.  The domain is a
rectangular box with uniform spacing per axis, which keeps flux-form
conservation exact on the discrete level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian box grid.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    cells : tuple of int
        Cell count per axis, at least 4 each.
    lengths : tuple of float
        Physical box edge lengths per axis, strictly positive.
    """

    dim: int
    cells: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        if len(self.cells) != self.dim or len(self.lengths) != self.dim:
            raise ValueError("cells and lengths must have one entry per axis")
        if any(n < 4 for n in self.cells):
            raise ValueError(f"need at least 4 cells per axis, got {self.cells}")
        if any(L <= 0 for L in self.lengths):
            raise ValueError(f"lengths must be positive, got {self.lengths}")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @property
    def min_spacing(self) -> float:
        return min(self.spacing)

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for h in self.spacing:
            v *= h
        return v

    @property
    def volume(self) -> float:
        v = 1.0
        for L in self.lengths:
            v *= L
        return v

    @property
    def cell_count(self) -> int:
        c = 1
        for n in self.cells:
            c *= n
        return c

    def centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        h = self.spacing[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def face_positions(self, axis: int) -> np.ndarray:
        """Face-plane coordinates along the axis the face is normal to."""
        h = self.spacing[axis]
        return np.arange(self.cells[axis] + 1) * h

    def center_mesh(self) -> list[np.ndarray]:
        """Dense cell-center coordinate arrays, one per axis, C-ordered."""
        axes = [self.centers(a) for a in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def face_shape(self, axis: int) -> tuple[int, ...]:
        """Array shape of the face-normal component along ``axis``."""
        return tuple(
            n + 1 if a == axis else n for a, n in enumerate(self.cells)
        )

    def face_center_mesh(self, axis: int) -> list[np.ndarray]:
        """Coordinate arrays for centers of faces normal to ``axis``."""
        coords = []
        for a in range(self.dim):
            if a == axis:
                coords.append(self.face_positions(a))
            else:
                coords.append(self.centers(a))
        return list(np.meshgrid(*coords, indexing="ij"))

    def boundary_distance(self, x) -> float:
        """Distance from point ``x`` to the box boundary (inside the closure)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != grid dim {self.dim}")
        lengths = np.asarray(self.lengths)
        if np.any(x < -1e-12) or np.any(x - lengths > 1e-12):
            raise ValueError(f"point {x} lies outside the closed box")
        d = np.minimum(x, lengths - x)
        return float(np.min(d)) if d.ndim == 1 else np.min(d, axis=-1)


class ScalarField:
    """One value per cell center, C-ordered ``float64`` array."""

    __slots__ = ("grid", "values", "units")

    def __init__(self, grid: GridSpec, values: np.ndarray | None = None, units: str = ""):
        self.grid = grid
        if values is None:
            values = np.zeros(grid.cells)
        else:
            values = np.ascontiguousarray(values, dtype=np.float64)
            if values.shape != grid.cells:
                raise ValueError(
                    f"values shape {values.shape} != grid cells {grid.cells}"
                )
        self.values = values
        self.units = units

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy(), self.units)

    def check_finite(self, name: str = "field") -> None:
        """Reject non-finite entries, reporting the first offending cell."""
        if not np.all(np.isfinite(self.values)):
            idx = tuple(int(i) for i in np.argwhere(~np.isfinite(self.values))[0])
            raise ValueError(f"non-finite value in {name} at cell {idx}")

    @classmethod
    def full(cls, grid: GridSpec, value: float, units: str = "") -> "ScalarField":
        return cls(grid, np.full(grid.cells, float(value)), units)


class FaceVectorField:
    """Face-normal vector components on the MAC grid.

    ``components[i]`` holds the axis-``i`` component on faces normal to
    axis ``i`` and therefore has ``cells[i] + 1`` entries along that axis.
    When the field represents a no-slip velocity, every boundary-face
    normal entry is exactly zero.
    """

    __slots__ = ("grid", "components", "units")

    def __init__(self, grid: GridSpec, components=None, units: str = ""):
        self.grid = grid
        if components is None:
            components = tuple(
                np.zeros(grid.face_shape(a)) for a in range(grid.dim)
            )
        else:
            comps = []
            for a, arr in enumerate(components):
                arr = np.ascontiguousarray(arr, dtype=np.float64)
                if arr.shape != grid.face_shape(a):
                    raise ValueError(
                        f"component {a} shape {arr.shape} != {grid.face_shape(a)}"
                    )
                comps.append(arr)
            if len(comps) != grid.dim:
                raise ValueError("need one component per axis")
            components = tuple(comps)
        self.components = components
        self.units = units

    def copy(self) -> "FaceVectorField":
        return FaceVectorField(
            self.grid, tuple(c.copy() for c in self.components), self.units
        )

    def check_finite(self, name: str = "face field") -> None:
        for a, arr in enumerate(self.components):
            if not np.all(np.isfinite(arr)):
                idx = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
                raise ValueError(f"non-finite value in {name}[{a}] at face {idx}")

    def boundary_normal_max(self) -> float:
        """Largest magnitude among boundary-face normal entries."""
        worst = 0.0
        for a, arr in enumerate(self.components):
            lo = np.take(arr, 0, axis=a)
            hi = np.take(arr, -1, axis=a)
            m = max(np.max(np.abs(lo)), np.max(np.abs(hi))) if lo.size else 0.0
            worst = max(worst, float(m))
        return worst

    def zero_boundary_normals(self) -> None:
        """Force boundary-face normal entries to exactly zero."""
        for a, arr in enumerate(self.components):
            sl = [slice(None)] * self.grid.dim
            sl[a] = 0
            arr[tuple(sl)] = 0.0
            sl[a] = -1
            arr[tuple(sl)] = 0.0
