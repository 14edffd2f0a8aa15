"""Command line interface.

Subcommands: ``simulate``, ``verify``, ``feasibility``, ``sweep``,
``convergence``.  Exit codes: 0 success, 1 verification failure,
2 solver rejection or blow-up, 3 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .acceptance import AcceptanceSuite, parse_check_selection
from .config import ConfigError, RunConfig, parse_config_file
from .feasibility import find_witness, m_star, m_threshold
from .poisson import PoissonDivergedError
from .runner import resume, run, summarize
from .solver import BlowUpError, StepRejected
from .studies import STUDIES, run_study
from .threads import set_thread_count

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_SOLVER = 2
EXIT_CONFIG = 3

FEASIBILITY_CSV_HEADER = ("l,m_star_closed_form,m_threshold_bisection,"
                          "abs_diff,witness_p,witness_q,witness_r")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="chemostokes",
                     description="Chemotaxis-Stokes numerical laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configured simulation")
    sim.add_argument("--config", required=True, help="configuration file")
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--threads", type=int, default=1)
    sim.add_argument("--seed", type=int, default=None,
                     help="override the config seed")
    sim.add_argument("--restart", default=None,
                     help="checkpoint file to resume from")

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    ver.add_argument("--checks", default=None,
                     help="comma list of criterion names or numbers")
    ver.add_argument("--out", default=None, help="artifact directory")
    ver.add_argument("--threads", type=int, default=1,
                     help="base thread count for artifact runs")

    fea = sub.add_parser("feasibility",
                         help="threshold comparison over a range of l")
    fea.add_argument("--l-min", type=float, default=2.05)
    fea.add_argument("--l-max", type=float, default=4.0)
    fea.add_argument("--points", type=int, default=40)
    fea.add_argument("--tol", type=float, default=1e-3)
    fea.add_argument("--out", default=None, help="CSV output path")

    swp = sub.add_parser("sweep", help="run a config across parameter values")
    swp.add_argument("--config", required=True)
    swp.add_argument("--param", default="model.eps",
                     help="dotted key, e.g. model.eps")
    swp.add_argument("--values", default="0.1,0.03,0.01,0",
                     help="comma list of values")
    swp.add_argument("--out", default=None)
    swp.add_argument("--threads", type=int, default=1,
                     help="concurrent sweep workers")
    swp.add_argument("--seed", type=int, default=None)

    con = sub.add_parser("convergence", help="run a named refinement study")
    con.add_argument("--study", required=True,
                     help="one of: " + ", ".join(sorted(STUDIES)))
    con.add_argument("--out", default=None, help="CSV output path")
    con.add_argument("--threads", type=int, default=1)
    return parser


def _load_config(path, seed_override=None) -> RunConfig:
    try:
        cfg = parse_config_file(path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    if seed_override is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=seed_override)
    return cfg


def _write_failure(out_dir, exc) -> None:
    if out_dir is None:
        return
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, StepRejected):
        payload["check"] = exc.check
        payload["value"] = exc.value
    if isinstance(exc, BlowUpError):
        payload["field"] = exc.field
        payload["location"] = list(exc.location)
        payload["step"] = exc.step
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    with open(Path(out_dir) / "failure.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config, args.seed)
    set_thread_count(args.threads)
    out_dir = Path(args.out) if args.out else Path(cfg.out_directory)
    opts = cfg.solver
    if not cfg.snapshots:
        from dataclasses import replace
        opts = replace(opts, snap_interval=0.0)
    try:
        if args.restart:
            result = resume(args.restart, cfg.model, opts, out_dir=out_dir,
                            expect_resume_hash=cfg.resume_hash())
        else:
            state = cfg.build_state()
            result = run(state, cfg.model, opts, out_dir=out_dir,
                         config_hash=cfg.config_hash(),
                         resume_hash=cfg.resume_hash())
    except (StepRejected, PoissonDivergedError, BlowUpError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        _write_failure(out_dir, exc)
        return EXIT_SOLVER
    summary = summarize(result.rows, cfg.config_hash())
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    criteria = None
    if args.checks is not None:
        criteria = parse_check_selection(args.checks)
    workdir = args.out or tempfile.mkdtemp(prefix="chemostokes_verify_")
    base = max(1, args.threads)
    suite = AcceptanceSuite(workdir, thread_counts=(base, 2, 8))
    results = suite.run_all(criteria)
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed "
          f"(artifacts under {workdir})")
    return EXIT_OK if not failed else EXIT_VERIFY_FAIL


def cmd_feasibility(args) -> int:
    if not (args.l_min > 2.0):
        raise ConfigError(f"l range must start above 2, got {args.l_min}")
    if not (args.l_max >= args.l_min):
        raise ConfigError("l-max must be at least l-min")
    if args.points < 1:
        raise ConfigError("points must be positive")
    if not (args.tol > 0):
        raise ConfigError("tol must be positive")
    lines = [FEASIBILITY_CSV_HEADER]
    for i in range(args.points):
        if args.points == 1:
            l = args.l_min
        else:
            l = args.l_min + (args.l_max - args.l_min) * i / (args.points - 1)
        closed = float(m_star(l))
        found = m_threshold(l, args.tol)
        witness = find_witness(closed + 0.05, l).witness
        p, q, r = (repr(float(v)) for v in witness)
        lines.append(f"{repr(l)},{repr(closed)},{repr(found)},"
                     f"{repr(abs(found - closed))},{p},{q},{r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _set_dotted(cfg_text: str, dotted: str, value: str) -> str:
    """Override one key in config text; supports section.key paths."""
    section, _, key = dotted.partition(".")
    if not key:
        raise ConfigError(f"sweep param must look like section.key, got {dotted!r}")
    lines = cfg_text.splitlines()
    out = []
    current = ""
    replaced = False
    for line in lines:
        stripped = line.split("#", 1)[0].strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            if current == section and not replaced:
                out.append(f"{key} = {value}")
                replaced = True
            current = stripped[1:-1].strip()
            out.append(line)
            continue
        if (current == section and "=" in stripped
                and stripped.split("=", 1)[0].strip() == key):
            out.append(f"{key} = {value}")
            replaced = True
            continue
        out.append(line)
    if not replaced:
        if current == section:
            out.append(f"{key} = {value}")
        else:
            out.append(f"[{section}]")
            out.append(f"{key} = {value}")
    return "\n".join(out) + "\n"


def cmd_sweep(args) -> int:
    base_text = Path(args.config).read_text(encoding="utf-8")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs at least one value")
    out_root = Path(args.out or "sweep_out")
    out_root.mkdir(parents=True, exist_ok=True)
    set_thread_count(1)

    def one(value: str):
        from .config import parse_config
        text = _set_dotted(base_text, args.param, value)
        cfg = parse_config(text)
        if args.seed is not None:
            from dataclasses import replace
            cfg = replace(cfg, seed=args.seed)
        tag = f"{args.param.split('.')[-1]}={value}"
        out_dir = out_root / tag
        state = cfg.build_state()
        result = run(state, cfg.model, cfg.solver, out_dir=out_dir,
                     config_hash=cfg.config_hash())
        summary = summarize(result.rows, cfg.config_hash())
        return tag, summary

    results = []
    try:
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(one, values))
        else:
            results = [one(v) for v in values]
    except (StepRejected, PoissonDivergedError, BlowUpError) as exc:
        print(f"solver failure during sweep: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    lines = ["value,final_t,steps,sup_n,all_verdicts_pass"]
    for tag, summary in results:
        ok = all(summary["verdicts"].values())
        value = tag.split("=", 1)[1]
        lines.append(f"{value},{repr(summary['final_t'])},{summary['steps']},"
                     f"{repr(summary['sup_n'])},{str(ok).lower()}")
    (out_root / "sweep_summary.csv").write_text("\n".join(lines) + "\n",
                                                encoding="utf-8")
    print(f"sweep complete: {len(results)} runs under {out_root}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    set_thread_count(args.threads)
    try:
        result = run_study(args.study)
    except ValueError as exc:
        raise ConfigError(str(exc))
    text = result.csv()
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "feasibility":
            return cmd_feasibility(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "convergence":
            return cmd_convergence(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
