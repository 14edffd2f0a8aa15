"""Run configuration: a small sectioned key=value format.

Example::

    seed = 0

    [grid]
    dim = 2
    cells = 48, 48
    lengths = 1.0, 1.0

    [model]
    m = 2.0
    l = 2.5
    eps = 0.01
    alpha_S = 1.0
    beta_S = 1.0
    s_law = constant
    s0 = 1.0
    f_law = linear
    grav = 0.0, -0.5

    [solver]
    safety = 0.85
    t_end = 5.0
    snap_interval = 0.5

    [initial]
    n_profile = gaussian
    n_sigma = 0.5
    n_mass = 1.0
    c_profile = uniform
    c_value = 1.0

Every key is validated before anything is built; the first problem is
reported with its line number.  Unknown sections or keys are rejected.
Omitted keys take the documented defaults, and the canonical echo
(:meth:`RunConfig.canonical_text`) renders the fully resolved
configuration byte-stably.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .grid import GridSpec
from .initial import build_density, build_solute, zero_velocity
from .model import F_LAWS, S_LAWS, ModelParams
from .solver import SolverOptions, SolverState, initial_state


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    model: ModelParams
    solver: SolverOptions
    n_spec: dict
    c_spec: dict
    out_directory: str
    snapshots: bool
    seed: int

    def canonical_text(self) -> str:
        g, m, s = self.grid, self.model, self.solver

        def vec(v):
            return ", ".join(repr(float(x)) for x in v)

        def ints(v):
            return ", ".join(str(int(x)) for x in v)

        lines = [
            f"seed = {self.seed}",
            "",
            "[grid]",
            f"dim = {g.dim}",
            f"cells = {ints(g.cells)}",
            f"lengths = {vec(g.lengths)}",
            "",
            "[model]",
            f"m = {repr(m.m)}",
            f"l = {repr(m.l)}",
            f"eps = {repr(m.eps)}",
            f"alpha_S = {repr(m.alpha_s)}",
            f"beta_S = {repr(m.beta_s)}",
            f"s_law = {m.s_law}",
            f"s0 = {repr(m.s0)}",
            f"f_law = {m.f_law}",
            f"grav = {vec(m.grav)}",
            f"rotation_axis = {vec(m.rotation_axis)}",
            "",
            "[solver]",
            f"safety = {repr(s.safety)}",
            f"t_end = {repr(s.t_end)}",
            f"snap_interval = {repr(s.snap_interval)}",
            f"proj_tol = {repr(s.proj_tol)}",
            f"max_cg_iters = {s.max_cg_iters}",
            f"energy_p = {repr(s.energy_p)}",
            f"energy_q = {repr(s.energy_q)}",
            f"preconditioner = {s.preconditioner}",
            "",
            "[initial]",
        ]
        for key in sorted(self.n_spec):
            lines.append(f"n_{key} = {_render(self.n_spec[key])}")
        for key in sorted(self.c_spec):
            lines.append(f"c_{key} = {_render(self.c_spec[key])}")
        lines += [
            "",
            "[output]",
            f"directory = {self.out_directory}",
            f"snapshots = {'true' if self.snapshots else 'false'}",
            "",
        ]
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def resume_hash(self) -> str:
        """Hash of everything a continuation must share; the horizon
        ``t_end`` may differ between the checkpointing and resuming runs."""
        lines = [ln for ln in self.canonical_text().splitlines()
                 if not ln.startswith("t_end = ")]
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()

    def build_state(self) -> SolverState:
        n0 = build_density(self.grid, self.n_spec, self.seed)
        c0 = build_solute(self.grid, self.c_spec)
        return initial_state(self.grid, n0, c0, zero_velocity(self.grid))


def _render(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (tuple, list)):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


_SECTIONS = ("grid", "model", "solver", "initial", "output")

_KNOWN_KEYS = {
    "": {"seed"},
    "grid": {"dim", "cells", "lengths"},
    "model": {"m", "l", "eps", "alpha_S", "beta_S", "s_law", "s0", "f_law",
              "grav", "rotation_axis"},
    "solver": {"safety", "t_end", "snap_interval", "proj_tol", "max_cg_iters",
               "energy_p", "energy_q", "preconditioner"},
    "initial": {"n_profile", "n_center", "n_sigma", "n_mass", "n_value",
                "n_lo", "n_hi", "c_profile", "c_value", "c_axis", "c_low",
                "c_high"},
    "output": {"directory", "snapshots"},
}


def _scan(text: str):
    """Tokenize into {section: {key: (raw, line)}} with strict key checks."""
    entries = {sec: {} for sec in ("",) + _SECTIONS}
    section = ""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS[section]:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} in {where}", lineno)
        if key in entries[section]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[section][key] = (value, lineno)
    return entries


class _Section:
    def __init__(self, entries: dict, name: str):
        self._entries = dict(entries)
        self._name = name

    def take(self, key, parser, default):
        if key not in self._entries:
            return default
        raw, line = self._entries.pop(key)
        try:
            return parser(raw)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", line) from exc

    def line_of(self, key, fallback=None):
        if key in self._entries:
            return self._entries[key][1]
        return fallback


def _float(raw: str) -> float:
    return float(raw)


def _int(raw: str) -> int:
    return int(raw)


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _float_tuple(raw: str):
    return tuple(float(p.strip()) for p in raw.split(","))


def _int_tuple(raw: str):
    return tuple(int(p.strip()) for p in raw.split(","))


def _choice(options):
    def parse(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return raw
    return parse


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate; first error wins, with its line number."""
    entries = _scan(text)
    top = _Section(entries[""], "")
    grid_s = _Section(entries["grid"], "grid")
    model_s = _Section(entries["model"], "model")
    solver_s = _Section(entries["solver"], "solver")
    init_s = _Section(entries["initial"], "initial")
    out_s = _Section(entries["output"], "output")

    seed = top.take("seed", _int, 0)

    dim_line = grid_s.line_of("dim")
    dim = grid_s.take("dim", _int, 2)
    cells_line = grid_s.line_of("cells")
    cells = grid_s.take("cells", _int_tuple, tuple([32] * dim))
    lengths_line = grid_s.line_of("lengths")
    lengths = grid_s.take("lengths", _float_tuple, tuple([1.0] * dim))
    try:
        grid = GridSpec(dim, cells, lengths)
    except ValueError as exc:
        raise ConfigError(str(exc), dim_line or cells_line or lengths_line)

    l_line = model_s.line_of("l")
    m_line = model_s.line_of("m")
    eps_line = model_s.line_of("eps")
    kwargs = {
        "m": model_s.take("m", _float, 2.0),
        "l": model_s.take("l", _float, 2.5),
        "eps": model_s.take("eps", _float, 0.01),
        "alpha_s": model_s.take("alpha_S", _float, 1.0),
        "beta_s": model_s.take("beta_S", _float, 0.0),
        "s_law": model_s.take("s_law", _choice(S_LAWS), "constant"),
        "s0": model_s.take("s0", _float, 1.0),
        "f_law": model_s.take("f_law", _choice(F_LAWS), "linear"),
        "grav": model_s.take("grav", _float_tuple, tuple([0.0] * dim)),
        "rotation_axis": model_s.take("rotation_axis", _float_tuple,
                                      (0.0, 0.0, 1.0)),
    }
    if not (kwargs["l"] > 2.0):
        raise ConfigError(
            f"l must exceed 2 (sensitivity growth hypothesis), got {kwargs['l']}",
            l_line)
    if not (kwargs["m"] > 1.0):
        raise ConfigError(
            f"m must exceed 1 (nonlinear diffusion hypothesis), got {kwargs['m']}",
            m_line)
    try:
        model = ModelParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), eps_line or m_line or l_line)
    if len(model.grav) != grid.dim:
        raise ConfigError(
            f"grav has {len(model.grav)} components for a {grid.dim}D grid",
            model_s.line_of("grav"))

    solver_kwargs = {
        "safety": solver_s.take("safety", _float, 0.4),
        "t_end": solver_s.take("t_end", _float, 1.0),
        "snap_interval": solver_s.take("snap_interval", _float, 0.0),
        "proj_tol": solver_s.take("proj_tol", _float, 1e-8),
        "max_cg_iters": solver_s.take("max_cg_iters", _int, 500),
        "energy_p": solver_s.take("energy_p", _float, 2.0),
        "energy_q": solver_s.take("energy_q", _float, 2.0),
        "preconditioner": solver_s.take("preconditioner",
                                        _choice(("dct", "none")), "dct"),
    }
    try:
        solver = SolverOptions(**solver_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), solver_s.line_of("safety"))

    n_spec = {"profile": init_s.take("n_profile",
                                     _choice(("gaussian", "uniform", "zero",
                                              "random")), "gaussian")}
    if n_spec["profile"] == "gaussian":
        n_spec["center"] = init_s.take(
            "n_center", _float_tuple, tuple(L / 2 for L in grid.lengths))
        if len(n_spec["center"]) != grid.dim:
            raise ConfigError("n_center dimension mismatch",
                              init_s.line_of("n_center"))
        n_spec["sigma"] = init_s.take("n_sigma", _float, 0.5)
        n_spec["mass"] = init_s.take("n_mass", _float, 1.0)
    elif n_spec["profile"] == "uniform":
        n_spec["value"] = init_s.take("n_value", _float, 1.0)
    elif n_spec["profile"] == "random":
        n_spec["lo"] = init_s.take("n_lo", _float, 0.0)
        n_spec["hi"] = init_s.take("n_hi", _float, 1.0)

    c_spec = {"profile": init_s.take("c_profile",
                                     _choice(("uniform", "linear", "zero")),
                                     "uniform")}
    if c_spec["profile"] == "uniform":
        c_spec["value"] = init_s.take("c_value", _float, 1.0)
    elif c_spec["profile"] == "linear":
        c_spec["axis"] = init_s.take("c_axis", _int, 0)
        c_spec["low"] = init_s.take("c_low", _float, 0.0)
        c_spec["high"] = init_s.take("c_high", _float, 1.0)

    # leftover keys belong to profiles that were not selected
    for sec in (top, grid_s, model_s, solver_s, init_s):
        for key, (_, line) in sec._entries.items():
            raise ConfigError(
                f"key {key!r} does not apply to the selected profile", line)

    out_directory = out_s.take("directory", str, "out")
    snapshots = out_s.take("snapshots", _bool, True)
    for key, (_, line) in out_s._entries.items():
        raise ConfigError(f"unexpected key {key!r}", line)

    return RunConfig(grid=grid, model=model, solver=solver, n_spec=n_spec,
                     c_spec=c_spec, out_directory=out_directory,
                     snapshots=snapshots, seed=seed)


def parse_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
