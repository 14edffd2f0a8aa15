"""On-disk formats: field snapshots, invariant series, checkpoints.

``.fld`` snapshot layout: one UTF-8 JSON header line with keys
``{name, units, dim, cells, lengths, time}`` terminated by a newline,
followed by the raw little-endian float64 array in C order (last axis
fastest).  ``cells`` records the stored array shape, so face-component
snapshots carry their own staggered shape.

The invariant series is a plain CSV with the fixed header
``step,t,dt,mass,n_min,n_max,c_min,c_max,div_u_inf,energy,dissipation``.
Floats are rendered with ``repr`` (shortest round-trip), which keeps
artifacts byte-stable across identical runs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .grid import FaceVectorField, GridSpec, ScalarField
from .invariants import CSV_HEADER, InvariantRow


def write_fld(path, name: str, array: np.ndarray, grid: GridSpec,
              time: float, units: str = "") -> None:
    header = {
        "name": name,
        "units": units,
        "dim": grid.dim,
        "cells": list(array.shape),
        "lengths": list(grid.lengths),
        "time": time,
    }
    data = np.ascontiguousarray(array, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(data.tobytes(order="C"))


def read_fld(path):
    """Returns ``(header dict, float64 array)``."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        raw = fh.read()
    shape = tuple(header["cells"])
    count = int(np.prod(shape))
    array = np.frombuffer(raw, dtype="<f8", count=count).reshape(shape).copy()
    return header, array


def write_scalar_snapshot(directory, tag: str, name: str, field: ScalarField,
                          time: float):
    path = Path(directory) / f"{tag}.fld"
    write_fld(path, name, field.values, field.grid, time, field.units)
    return path


def write_velocity_snapshot(directory, tag: str, u: FaceVectorField, time: float):
    paths = []
    for a, comp in enumerate(u.components):
        path = Path(directory) / f"{tag}_u{a}.fld"
        write_fld(path, f"u{a}", comp, u.grid, time, u.units)
        paths.append(path)
    return paths


# --------------------------------------------------------------------------
# invariant series CSV

def write_invariants_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(r.csv() + "\n")


def read_invariants_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        for line in fh:
            parts = line.strip().split(",")
            rows.append(InvariantRow(
                step=int(parts[0]), t=float(parts[1]), dt=float(parts[2]),
                mass=float(parts[3]), n_min=float(parts[4]),
                n_max=float(parts[5]), c_min=float(parts[6]),
                c_max=float(parts[7]), div_u_inf=float(parts[8]),
                energy=float(parts[9]), dissipation=float(parts[10])))
    return rows


# --------------------------------------------------------------------------
# checkpoints

MAGIC = "chemostokes-checkpoint-1"


def write_checkpoint(path, state, config_hash: str, next_snap_t: float,
                     resume_hash: str = "") -> None:
    g = state.grid
    meta = {
        "magic": MAGIC,
        "t": state.t,
        "step": state.step,
        "config_hash": config_hash,
        "resume_hash": resume_hash or config_hash,
        "next_snap_t": next_snap_t,
        "dim": g.dim,
        "cells": list(g.cells),
        "lengths": list(g.lengths),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(meta, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for arr in (state.n.values, state.c.values, state.P.values,
                    *state.u.components):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes(order="C"))


def read_checkpoint(path):
    """Returns ``(meta, state)``; import deferred to avoid a cycle."""
    from .solver import SolverState

    with open(path, "rb") as fh:
        meta = json.loads(fh.readline().decode("utf-8"))
        if meta.get("magic") != MAGIC:
            raise ValueError("not a checkpoint file")
        raw = fh.read()
    grid = GridSpec(meta["dim"], tuple(meta["cells"]), tuple(meta["lengths"]))
    offset = 0

    def take(shape):
        nonlocal offset
        count = int(np.prod(shape))
        arr = np.frombuffer(raw, dtype="<f8", count=count,
                            offset=offset * 8).reshape(shape).copy()
        offset += count
        return arr

    n = ScalarField(grid, take(grid.cells))
    c = ScalarField(grid, take(grid.cells))
    P = ScalarField(grid, take(grid.cells))
    comps = tuple(take(grid.face_shape(a)) for a in range(grid.dim))
    u = FaceVectorField(grid, comps)
    state = SolverState(meta["t"], meta["step"], n, c, u, P)
    return meta, state


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# --------------------------------------------------------------------------
# minimal JSON schema validation (type and required-key checks)

def validate_json(obj, schema: dict, where: str = "$") -> None:
    """Validate ``obj`` against the shipped schema subset.

    Supports ``type`` (object, array, string, number, integer, boolean),
    ``required``, ``properties``, and ``items``; raises ``ValueError``
    with a JSON-path style location on the first mismatch.
    """
    t = schema.get("type")
    if t == "object":
        if not isinstance(obj, dict):
            raise ValueError(f"{where}: expected object, got {type(obj).__name__}")
        for key in schema.get("required", []):
            if key not in obj:
                raise ValueError(f"{where}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in obj:
                validate_json(obj[key], sub, f"{where}.{key}")
    elif t == "array":
        if not isinstance(obj, list):
            raise ValueError(f"{where}: expected array, got {type(obj).__name__}")
        items = schema.get("items")
        if items:
            for i, el in enumerate(obj):
                validate_json(el, items, f"{where}[{i}]")
    elif t == "string":
        if not isinstance(obj, str):
            raise ValueError(f"{where}: expected string")
    elif t == "number":
        if not isinstance(obj, (int, float)) or isinstance(obj, bool):
            raise ValueError(f"{where}: expected number")
    elif t == "integer":
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise ValueError(f"{where}: expected integer")
    elif t == "boolean":
        if not isinstance(obj, bool):
            raise ValueError(f"{where}: expected boolean")


def load_schema(name: str) -> dict:
    path = Path(__file__).parent / "schemas" / f"{name}.json"
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
