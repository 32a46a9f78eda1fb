"""Command line: ``allocate``, ``simulate`` and ``plot``.

Exit codes: 0 success, 1 validation error, 2 simulation fault.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .devs import ConfigurationError, SimulationFault

OK, INVALID, FAULT = 0, 1, 2


def _allocate(args) -> int:
    from .allocation import allocate
    from .mobility import read_traces

    traces = read_traces(args.traces)
    placement = allocate(traces, args.cell_size, args.window, args.aps, args.replication,
                         args.sessions_per_pu, seed=args.seed)
    Path(args.out).write_text(json.dumps(placement.to_config(), indent=2) + "\n")
    print(f"{len(placement.aps)} APs, {placement.edc_count} EDCs x {placement.pus_per_edc} PUs -> {args.out}")
    return OK


def _simulate(args) -> int:
    from .run import run
    from .scenario import experiment, load_scenario

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.duration is not None:
        overrides["duration"] = args.duration
    scenario = load_scenario(args.scenario, overrides)
    if args.experiment:
        scenario = experiment(scenario, args.experiment)
    result = run(scenario, args.out)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return OK


def _plot(args) -> int:
    from .plot import plot_dir

    for path in plot_dir(args.inp, args.out):
        print(path)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fogsim")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="place APs and EDCs from mobility traces")
    p.add_argument("--traces", required=True)
    p.add_argument("--cell-size", type=float, default=40.0)
    p.add_argument("--window", type=float, default=60.0)
    p.add_argument("--aps", type=int, default=None, help="default: one AP per 10 peak UEs")
    p.add_argument("--replication", type=int, default=3)
    p.add_argument("--sessions-per-pu", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_allocate)

    p = sub.add_parser("simulate", help="run a scenario and write CSV streams")
    p.add_argument("--scenario", required=True, help="file path or bundled name")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--experiment", choices=("I", "II"),
                   help="override EDC policies with a reference set-up")
    p.set_defaults(func=_simulate)

    p = sub.add_parser("plot", help="render CSV streams as images")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except SimulationFault as fault:
        print(f"simulation fault: {fault}", file=sys.stderr)
        return FAULT
    except ConfigurationError as exc:
        for line in getattr(exc, "violations", [str(exc)]):
            print(f"invalid: {line}", file=sys.stderr)
        return INVALID
    except (OSError, ValueError, KeyError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
