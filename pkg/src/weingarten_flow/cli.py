"""Command-line front end.

    weingarten-flow simulate  --config run.json --output traj.csv
    weingarten-flow collapse  --config run.json
    weingarten-flow verify    [--suite oracle ...]
    weingarten-flow sweep     --config run.json --range tau0=0.25,0.5,1 --jobs 4
    weingarten-flow avoidance --config pair.json --output curve.csv
    weingarten-flow families

Exit codes: 0 success, 1 failed check, 2 configuration error,
3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Optional

import numpy as np

from .avoidance import (
    CollinearDisjointSpheres, ConcentricSpheres, SphereInsideHorosphere, check_monotone,
    distance_curve,
)
from .config import (
    ConfigError, parse_ambient, parse_run_config, parse_solver, parse_value,
    parse_weingarten, set_path,
)
from .families import CATALOGUE
from .flow import CollapseResult, FlowError, FlowTrajectory, collapse_time, integrate
from .oracle import closed_form_T
from .verify import SUITES, run_verify
from .weingarten import WeingartenDomainError

log = logging.getLogger("weingarten_flow")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "collapse result",
    "type": "object",
    "required": ["config_echo", "verdict", "T", "end", "error_estimate",
                 "closed_form", "abs_diff", "wall_time_s"],
    "properties": {
        "config_echo": {"type": "object"},
        "verdict": {"enum": ["collapsed", "non-collapsing", "truncated"]},
        "reason": {"type": ["string", "null"]},
        "T": {"type": ["number", "null"]},
        "end": {"type": ["string", "null"]},
        "error_estimate": {"type": "number", "minimum": 0},
        "closed_form": {"type": ["number", "null"]},
        "abs_diff": {"type": ["number", "null"]},
        "monotone_speed": {"type": ["boolean", "null"]},
        "t_max": {"type": ["number", "null"]},
        "wall_time_s": {"type": ["number", "null"]},
    },
    "additionalProperties": False,
}


class NumericFailure(RuntimeError):
    pass


# -- serialization ---------------------------------------------------------------

def fmt_float(x: float) -> str:
    """17 significant digits: lossless for IEEE doubles."""
    return format(float(x), ".17g")


def _json_encode(obj: Any, indent: int, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        text = fmt_float(obj)
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_json_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _json_encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return _json_encode(obj, 2) + "\n"


def _write(path: Optional[str], text: str, fallback=None):
    if path is None or path == "-":
        (fallback or sys.stdout).write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def trajectory_columns(traj: FlowTrajectory) -> list[str]:
    k = traj.samples[0].curvatures
    return ["t", "tau", "phi", "speed"] + [f"k{i + 1}_m{m}" for i, m in enumerate(k.multiplicities)]


def trajectory_rows(traj: FlowTrajectory) -> list[list[float]]:
    return [[s.t, s.tau, s.phi, s.speed, *s.curvatures.values] for s in traj.samples]


def trajectory_csv(traj: FlowTrajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(trajectory_columns(traj))
    for row in trajectory_rows(traj):
        writer.writerow([fmt_float(x) for x in row])
    return buf.getvalue()


def result_record(raw: dict, result: CollapseResult, closed: Optional[float],
                  wall: Optional[float]) -> dict:
    abs_diff = None
    if closed is not None and result.T is not None:
        abs_diff = abs(result.T - closed)
    return {
        "config_echo": raw,
        "verdict": result.verdict,
        "reason": result.reason,
        "T": result.T,
        "end": result.end,
        "error_estimate": result.error_estimate,
        "closed_form": closed,
        "abs_diff": abs_diff,
        "monotone_speed": result.monotone_speed,
        "t_max": result.t_max,
        "wall_time_s": wall,
    }


# -- configuration -----------------------------------------------------------

def load_config(args) -> dict:
    doc: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"invalid JSON in {args.config}: {exc}") from None
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(item, "overrides are written KEY=VALUE")
        key, value = item.split("=", 1)
        doc = set_path(doc, key, parse_value(value))
    direct = {"tau0": args.tau0, "solver.rtol": args.rtol, "solver.atol": args.atol,
              "solver.t_max": args.t_max, "output.format": args.format,
              "output.path": args.output}
    for key, value in direct.items():
        if value is not None:
            doc = set_path(doc, key, value)
    return doc


# -- commands ----------------------------------------------------------------

def _run_collapse(doc: dict, timing: bool = True) -> dict:
    cfg = parse_run_config(doc)
    start = time.perf_counter()
    try:
        result = collapse_time(cfg.problem)
    except (FlowError, ArithmeticError, WeingartenDomainError) as exc:
        raise NumericFailure(str(exc)) from exc
    wall = time.perf_counter() - start if timing else None
    return result_record(doc, result, closed_form_T(cfg.problem), wall)


def cmd_simulate(args) -> int:
    doc = load_config(args)
    cfg = parse_run_config(doc)
    start = time.perf_counter()
    try:
        traj = integrate(cfg.problem, cfg.solver)
        if cfg.output.samples:
            grid = np.linspace(0.0, traj.samples[-1].t, cfg.output.samples)
            full = integrate(cfg.problem, cfg.solver, t_eval=grid)
            # near the focal end many steps share one rounded t; keep the last of each
            keep = {float(x) for x in grid}
            by_t = {s.t: s for s in full.samples if s.t in keep}
            traj = FlowTrajectory(full.problem, list(by_t.values()), full.terminal)
    except (FlowError, ArithmeticError, WeingartenDomainError) as exc:
        raise NumericFailure(str(exc)) from exc
    wall = time.perf_counter() - start if not args.no_timing else None
    record = result_record(doc, traj.terminal, closed_form_T(cfg.problem), wall)
    if cfg.output.format == "csv":
        body = trajectory_csv(traj)
    else:
        body = dumps({"columns": trajectory_columns(traj), "rows": trajectory_rows(traj),
                      "terminal": record})
    _write(cfg.output.path, body)
    summary = dumps(record)
    (sys.stderr if cfg.output.path in (None, "-") else sys.stdout).write(summary)
    return EXIT_OK


def cmd_collapse(args) -> int:
    doc = load_config(args)
    record = _run_collapse(doc, timing=not args.no_timing)
    _write(args.output, dumps(record))
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = args.suite or list(SUITES)
    start = time.perf_counter()
    checks = run_verify(suites, seed=args.seed)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        nums = ""
        if c.value is not None and c.reference is not None:
            nums = f" value={fmt_float(c.value)} reference={fmt_float(c.reference)} diff={c.diff:.3e}"
        if c.tol is not None:
            nums += f" tol={c.tol:.3e}"
        lines.append(f"{status} [{c.suite}] {c.name}{nums} {c.detail}".rstrip())
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed "
                 f"in {time.perf_counter() - start:.1f} s")
    if args.format == "json" and args.output:
        _write(args.output, dumps([c.__dict__ for c in checks]))
    else:
        _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK if failed == 0 else EXIT_CHECK


def _sweep_cell(doc: dict) -> dict:
    try:
        return _run_collapse(doc, timing=False)
    except ConfigError as exc:
        return {"config_echo": doc, "verdict": None, "error": str(exc)}
    except NumericFailure as exc:
        return {"config_echo": doc, "verdict": None, "error": str(exc)}


def cmd_sweep(args) -> int:
    base = load_config(args)
    if not args.range:
        raise ConfigError("range", "sweep needs at least one --range KEY=v1,v2,...")
    keys, values = [], []
    for item in args.range:
        if "=" not in item:
            raise ConfigError(item, "ranges are written KEY=v1,v2,...")
        key, spec = item.split("=", 1)
        keys.append(key)
        values.append([parse_value(v) for v in spec.split(",")])
    cells = []
    for combo in itertools.product(*values):
        doc = base
        for key, value in zip(keys, combo):
            doc = set_path(doc, key, value)
        cells.append(doc)
    # validate before fanning out so config errors exit with code 2
    for doc in cells:
        parse_run_config(doc)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_sweep_cell, cells))
    else:
        records = [_sweep_cell(doc) for doc in cells]
    fields = ["verdict", "T", "end", "error_estimate", "closed_form", "abs_diff"]
    if args.format == "json":
        rows = [{**dict(zip(keys, combo)), **{f: r.get(f) for f in fields + ["error"]}}
                for combo, r in zip(itertools.product(*values), records)]
        _write(args.output, dumps(rows))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys + fields)
        for combo, r in zip(itertools.product(*values), records):
            cells_out = [json.dumps(v) if not isinstance(v, str) else v for v in combo]
            for f in fields:
                v = r.get(f)
                cells_out.append("" if v is None else fmt_float(v) if isinstance(v, float) else v)
            writer.writerow(cells_out)
        _write(args.output, buf.getvalue())
    return EXIT_OK if all(r.get("verdict") for r in records) else EXIT_NUMERIC


def parse_scenario(doc: dict):
    ambient = parse_ambient(doc.get("ambient") or {}, "ambient")
    spec = parse_weingarten(doc.get("weingarten") or {}, "weingarten")
    sc = doc.get("scenario")
    if not isinstance(sc, dict):
        raise ConfigError("scenario", "missing field")
    kind = sc.get("kind")
    try:
        if kind == "concentric":
            scenario = ConcentricSpheres(ambient, spec, float(sc["tau_outer"]), float(sc["tau_inner"]))
        elif kind == "collinear":
            scenario = CollinearDisjointSpheres(ambient, spec, float(sc["d"]),
                                                float(sc["tau1"]), float(sc["tau2"]))
        elif kind == "sphere_in_horoball":
            scenario = SphereInsideHorosphere(ambient, spec, float(sc["radius"]), float(sc["gap"]))
        else:
            raise ConfigError("scenario.kind", f"unknown scenario kind {kind!r}")
        scenario.validate()
    except KeyError as exc:
        raise ConfigError(f"scenario.{exc.args[0]}", "missing field") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("scenario", str(exc)) from None
    return scenario


def cmd_avoidance(args) -> int:
    doc = load_config(args)
    scenario = parse_scenario(doc)
    solver, _ = parse_solver(doc.get("solver"))
    grid = int(doc.get("grid", 200))
    tol = float(doc.get("tol", 1e-9))
    try:
        curve = distance_curve(scenario, solver, grid=grid)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None
    except (FlowError, ArithmeticError) as exc:
        raise NumericFailure(str(exc)) from exc
    verdict = check_monotone(curve, tol)
    if args.format == "json":
        body = dumps({"t": curve.t, "D": curve.D})
    else:
        body = "t,D\n" + "".join(f"{fmt_float(t)},{fmt_float(d)}\n" for t, d in zip(curve.t, curve.D))
    _write(args.output, body, fallback=sys.stdout)
    summary = {
        "config_echo": doc,
        "monotone": verdict.passed,
        "worst_violation": verdict.worst_violation,
        "first_violation": verdict.first_violation,
        "horizon": curve.horizon,
        "justification": curve.justification,
        "extension": curve.extension,
    }
    (sys.stdout if args.output not in (None, "-") else sys.stderr).write(dumps(summary))
    return EXIT_OK if verdict.passed else EXIT_CHECK


def cmd_families(args) -> int:
    width = max(map(len, CATALOGUE))
    text = "".join(f"{k.ljust(width)}  {v}\n" for k, v in CATALOGUE.items())
    _write(args.output, text)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so a flag
    # given before the subcommand is not reset by the subparser
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=d(None), help="JSON configuration file")
    common.add_argument("--output", default=d(None), help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=d(None))
    common.add_argument("--jobs", type=int, default=d(1), help="parallel sweep cells")
    common.add_argument("--seed", type=int, default=d(0))
    common.add_argument("--set", action="append", metavar="KEY=VALUE", default=d(None),
                        help="override a config field by dotted path (JSON value)")
    common.add_argument("--tau0", type=float, default=d(None))
    common.add_argument("--rtol", type=float, default=d(None))
    common.add_argument("--atol", type=float, default=d(None))
    common.add_argument("--t-max", dest="t_max", type=float, default=d(None))
    common.add_argument("--no-timing", action="store_true", default=d(False),
                        help="write wall_time_s as null for byte-identical reruns")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="weingarten-flow", description=__doc__.split("\n")[0],
                                     parents=[_common_flags(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate a flow, write its trajectory")
    sub.add_parser("collapse", parents=[common], help="collapse time with closed-form comparison")
    p = sub.add_parser("verify", parents=[common], help="run the verification grid")
    p.add_argument("--suite", action="append", choices=SUITES)
    p = sub.add_parser("sweep", parents=[common], help="collapse times over a parameter grid")
    p.add_argument("--range", action="append", metavar="KEY=v1,v2,...")
    sub.add_parser("avoidance", parents=[common], help="distance curve of a pair scenario")
    sub.add_parser("families", parents=[common], help="print the family catalogue")
    return parser


COMMANDS = {
    "simulate": cmd_simulate, "collapse": cmd_collapse, "verify": cmd_verify,
    "sweep": cmd_sweep, "avoidance": cmd_avoidance, "families": cmd_families,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
