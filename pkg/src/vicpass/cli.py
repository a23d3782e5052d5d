"""Command line front end for the simulator.

Subcommands:

* ``simulate``  -- run a named or YAML-defined scenario and write the trace
* ``metrics``   -- summarize passivity violations in a saved trace
* ``catalogue`` -- list the built-in scenario names
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from .harness import read_trace, run_scenario, violation_metrics, write_trace
from .scenario import (
    METHODS,
    build_scenario,
    catalogue_names,
    load_scenario,
    random_scenario,
)


def _resolve_scenario(args):
    if args.random_seed is not None:
        method = args.method or "stiffness_change"
        return random_scenario(args.random_seed, method)
    name = args.scenario
    if name is None:
        raise SystemExit("simulate needs --scenario or --random-seed")
    if name in catalogue_names():
        scenario = build_scenario(name)
    elif Path(name).exists():
        scenario = load_scenario(name)
    else:
        raise SystemExit(
            f"unknown scenario {name!r}: not a catalogue name "
            f"({', '.join(catalogue_names())}) and no such file")
    overrides = {}
    if args.method is not None:
        overrides["method"] = args.method
    if args.dt is not None:
        overrides["dt"] = args.dt
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    return scenario


def _cmd_simulate(args) -> int:
    scenario = _resolve_scenario(args)
    trace = run_scenario(scenario)
    out = args.out or f"{scenario.name}.csv"
    write_trace(trace, out, decimate=args.decimate)
    metrics = violation_metrics(trace, threshold=args.threshold)
    print(f"{scenario.name}: {trace.n_rows()} rows -> {out}")
    print(f"violations above {args.threshold:g} W: "
          f"{metrics.percent_steps:.3f}% of steps, "
          f"{metrics.energy_joules:.6e} J")
    return 0


def _cmd_metrics(args) -> int:
    trace = read_trace(args.trace)
    metrics = violation_metrics(trace, threshold=args.threshold)
    print(f"{args.trace}: {trace.n_rows()} rows")
    print(f"violations above {args.threshold:g} W: "
          f"{metrics.percent_steps:.3f}% of steps, "
          f"{metrics.energy_joules:.6e} J")
    return 0


def _cmd_catalogue(_args) -> int:
    for name in catalogue_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vicpass",
        description="Passivity-checked variable impedance simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write its trace")
    sim.add_argument("--scenario", help="catalogue name or YAML file path")
    sim.add_argument("--random-seed", type=int, default=None,
                     help="run a member of the seeded random family instead")
    sim.add_argument("--method", choices=METHODS, default=None,
                     help="override the scenario's passivation method")
    sim.add_argument("--dt", type=float, default=None,
                     help="override the scenario's time step in seconds")
    sim.add_argument("--out", default=None,
                     help="output CSV path (default: <scenario name>.csv)")
    sim.add_argument("--decimate", type=int, default=1,
                     help="keep every nth row of the trace (last row always kept)")
    sim.add_argument("--threshold", type=float, default=0.0,
                     help="violation threshold in watts for the summary line")
    sim.set_defaults(func=_cmd_simulate)

    met = sub.add_parser("metrics", help="summarize violations in a saved trace")
    met.add_argument("--trace", required=True, help="trace CSV produced by simulate")
    met.add_argument("--threshold", type=float, default=0.0,
                     help="violation threshold in watts")
    met.set_defaults(func=_cmd_metrics)

    cat = sub.add_parser("catalogue", help="list built-in scenario names")
    cat.set_defaults(func=_cmd_catalogue)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
