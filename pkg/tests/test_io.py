"""Snapshot, CSV, and checkpoint formats."""

import json

import numpy as np
import pytest

from chemostokes.fldio import (load_schema, read_checkpoint, read_fld,
                               read_invariants_csv, validate_json, write_fld,
                               write_checkpoint, write_invariants_csv)
from chemostokes.grid import ScalarField
from chemostokes.invariants import CSV_HEADER, InvariantRow
from chemostokes.runner import run
from chemostokes.scenarios import smoke_setup
from chemostokes.solver import initial_state

from conftest import random_scalar


class TestFldFormat:
    def test_roundtrip_scalar(self, grid_rect, rng, tmp_path):
        f = random_scalar(grid_rect, rng)
        path = tmp_path / "field.fld"
        write_fld(path, "n", f.values, grid_rect, 1.25, units="cells")
        header, data = read_fld(path)
        assert header["name"] == "n"
        assert header["units"] == "cells"
        assert header["dim"] == 2
        assert header["cells"] == list(grid_rect.cells)
        assert header["lengths"] == list(grid_rect.lengths)
        assert header["time"] == 1.25
        assert np.array_equal(data, f.values)

    def test_header_is_json_line_then_le_doubles(self, grid32, tmp_path):
        f = ScalarField.full(grid32, 2.0)
        path = tmp_path / "x.fld"
        write_fld(path, "x", f.values, grid32, 0.0)
        raw = path.read_bytes()
        nl = raw.index(b"\n")
        header = json.loads(raw[:nl].decode("utf-8"))
        validate_json(header, load_schema("fld_header"))
        body = raw[nl + 1:]
        assert len(body) == 8 * grid32.cell_count
        assert np.frombuffer(body, dtype="<f8")[0] == 2.0

    def test_face_component_records_staggered_shape(self, grid_rect, tmp_path):
        arr = np.zeros(grid_rect.face_shape(0))
        path = tmp_path / "u0.fld"
        write_fld(path, "u0", arr, grid_rect, 0.5)
        header, data = read_fld(path)
        assert tuple(header["cells"]) == grid_rect.face_shape(0)
        assert data.shape == grid_rect.face_shape(0)


class TestInvariantCsv:
    def test_roundtrip(self, tmp_path):
        rows = [
            InvariantRow(0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 1.0, 0.0, 3.5, 0.0),
            InvariantRow(1, 1e-5, 1e-5, 1.0, 0.0, 1.9, 0.0, 0.99,
                         1.2e-16, 3.4, 0.1),
        ]
        path = tmp_path / "inv.csv"
        write_invariants_csv(path, rows)
        text = path.read_text()
        assert text.splitlines()[0] == CSV_HEADER
        back = read_invariants_csv(path)
        assert back == rows

    def test_repr_floats_roundtrip_exactly(self, tmp_path):
        value = 0.1 + 0.2  # not representable prettily
        rows = [InvariantRow(0, value, 0.0, 1.0, 0, 1, 0, 1, 0, 0, 0),
                InvariantRow(1, value, value, 1.0, 0, 1, 0, 1, 0, 0, 0)]
        path = tmp_path / "inv.csv"
        write_invariants_csv(path, rows)
        assert read_invariants_csv(path)[0].t == value


class TestCheckpoint:
    def test_roundtrip(self, grid_rect, rng, tmp_path):
        state = initial_state(grid_rect, random_scalar(grid_rect, rng),
                              random_scalar(grid_rect, rng))
        state.t = 0.75
        state.step = 123
        path = tmp_path / "c.ckpt"
        write_checkpoint(path, state, "deadbeef", 0.8)
        meta, back = read_checkpoint(path)
        assert meta["config_hash"] == "deadbeef"
        assert meta["next_snap_t"] == 0.8
        assert back.t == 0.75 and back.step == 123
        assert np.array_equal(back.n.values, state.n.values)
        assert np.array_equal(back.c.values, state.c.values)
        for a, b in zip(back.u.components, state.u.components):
            assert np.array_equal(a, b)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b'{"magic": "nope"}\n')
        with pytest.raises(ValueError):
            read_checkpoint(path)


class TestRunArtifacts:
    def test_output_tree_and_schema(self, tmp_path):
        state, params, opts = smoke_setup(cells=16, t_end=0.02,
                                          snap_interval=0.01)
        run(state, params, opts, out_dir=tmp_path, config_hash="cafe")
        assert (tmp_path / "invariants.csv").exists()
        assert (tmp_path / "checkpoint.ckpt").exists()
        summary = json.loads((tmp_path / "summary.json").read_text())
        validate_json(summary, load_schema("summary"))
        assert summary["config_hash"] == "cafe"
        snaps = sorted((tmp_path / "snapshots").glob("*.fld"))
        # t = 0, 0.01, 0.02 with n, c, P, u0, u1 each
        assert len(snaps) == 3 * 5
        names = {read_fld(p)[0]["name"] for p in snaps}
        assert names == {"n", "c", "P", "u0", "u1"}
        header, _ = read_fld(tmp_path / "snapshots" / "snap_000001_n.fld")
        assert header["time"] == pytest.approx(0.01)

    def test_rerun_bit_identical(self, tmp_path):
        digests = []
        for tag in ("a", "b"):
            state, params, opts = smoke_setup(cells=16, t_end=0.02,
                                              snap_interval=0.01)
            out = tmp_path / tag
            run(state, params, opts, out_dir=out, config_hash="x")
            digests.append(sorted(
                (p.name, p.read_bytes()) for p in out.rglob("*") if p.is_file()))
        names_a = [n for n, _ in digests[0]]
        names_b = [n for n, _ in digests[1]]
        assert names_a == names_b
        assert digests[0] == digests[1]
