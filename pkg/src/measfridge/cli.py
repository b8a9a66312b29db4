"""Command-line entry point.

    measfridge run CONFIG [--seed N] [--grid N] [--out PATH] [--jobs N]
    measfridge preset NAME [--emit-config] [...]
    measfridge sweep CONFIG --parameter PATH --range START STOP --points N [...]
    measfridge trajectory CONFIG [--trajectories K] [--ensemble N] [...]

Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .baths import DomainError
from .config import ConfigError, RunConfig
from .scan import Table, run
from .solvers import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, help="override solver.base_seed")
    p.add_argument("--grid", type=int, help="override solver.n_grid (cycle quadrature nodes)")
    p.add_argument("--out", help="CSV path; '-' writes the table to stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="measfridge", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a config file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("preset", help="run (or print) a figure preset")
    p.add_argument("name")
    p.add_argument("--emit-config", action="store_true", help="print the preset document and exit")
    _common(p)

    p = sub.add_parser("sweep", help="1-D sweep of one config field")
    p.add_argument("config")
    p.add_argument("--parameter", required=True, help="dotted path, e.g. measurement.gamma_m")
    p.add_argument("--range", nargs=2, type=float, required=True, metavar=("START", "STOP"))
    p.add_argument("--points", type=int, required=True)
    _common(p)

    p = sub.add_parser("trajectory", help="transient run with measurement-conditioned trajectories")
    p.add_argument("config")
    p.add_argument("--trajectories", type=int, help="number of displayed trajectories")
    p.add_argument("--ensemble", type=int, help="size of the averaged ensemble")
    _common(p)
    return parser


def resolve_config(args) -> RunConfig:
    if args.command == "preset":
        cfg = cfgmod.preset(args.name)
    else:
        cfg = cfgmod.load(args.config)
    data = cfg.to_dict()
    if args.command == "sweep":
        data["sweep"] = {
            "parameter": args.parameter, "start": args.range[0], "stop": args.range[1], "points": args.points,
        }
    if args.command == "trajectory":
        data["task"] = "transient"
        data["sweep"] = None
        if args.trajectories is not None:
            data["solver"]["n_trajectories"] = args.trajectories
        if args.ensemble is not None:
            data["solver"]["n_ensemble"] = args.ensemble
    if args.seed is not None:
        data["solver"]["base_seed"] = args.seed
    if args.grid is not None:
        data["solver"]["n_grid"] = args.grid
    if args.out is not None:
        data["output"] = args.out
    return cfgmod.from_dict(data)


def _summary(cfg: RunConfig, table: Table, target: str, elapsed: float) -> str:
    flagged = sum(1 for r in table.rows if r[-1])
    parts = [f"{cfg.name}: {cfg.resolved_task} {cfg.model}/{cfg.mode}", f"{len(table.rows)} rows -> {target}"]
    if "J_R" in table.header:
        j = table.column("J_R")
        parts.append(f"max J_R {np.nanmax(j):.6g}")
    elif "J_R_avg" in table.header:
        parts.append(f"final J_R_avg {table.column('J_R_avg')[-1]:.6g}")
    parts.append(f"regime warnings {flagged}")
    parts.append(f"{elapsed:.2f} s")
    return "; ".join(parts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "preset" and args.emit_config:
            text = cfgmod.preset_text(args.name)
            if args.out and args.out != "-":
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        table = run(cfg, jobs=max(1, args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DomainError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - start

    target = cfg.output or f"{cfg.name}.csv"
    text = table.to_csv()
    if target == "-":
        sys.stdout.write(text)
        print(_summary(cfg, table, "stdout", elapsed), file=sys.stderr)
    else:
        Path(target).write_text(text)
        print(_summary(cfg, table, target, elapsed))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
