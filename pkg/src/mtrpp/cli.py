"""Command-line interface.

Subcommands:
  solve       run one solver on an instance file and write a report
  compare     run several solvers and check they agree
  generate    write a built-in or seeded random instance as JSON
  validate    check instance structure and outage compatibility
  export-dot  dump the layered route graph in GraphViz format

Exit codes: 0 solved to optimality (or subcommand succeeded), 1 usage or
data error, 2 infeasible (or validation failed), 3 stopped at a limit,
4 solvers disagree (compare only).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import figures
from .benders import solve_mtrpp
from .generate import gen_ex1, gen_ex2_synthetic, gen_random_tdrpp, gen_t1
from .instance import (
    Instance,
    InstanceError,
    load_instance,
    parse_minutes,
    save_instance,
    instance_to_dict,
    validate_well_defined,
)
from .monolithic import solve_monolithic
from .oracle import OracleLimitError, oracle_solve
from .replicated import ReplicatedGraph
from .report import (
    EXIT_ERROR,
    EXIT_MISMATCH,
    EXIT_OK,
    SolveReport,
    comparison_table,
    from_decomposition,
    from_grid,
    from_monolithic,
    from_oracle,
)
from .timegrid import solve_on_grid

METHODS = ("decomposition", "grid", "oracle", "monolithic")

FAMILIES = {
    "t1": lambda args: gen_t1(),
    "t1-blocked": lambda args: gen_t1(blocked=True),
    "ex1a": lambda args: gen_ex1("a"),
    "ex1b": lambda args: gen_ex1("b"),
    "ex1c": lambda args: gen_ex1("c"),
    "synthetic": lambda args: gen_ex2_synthetic(args.seed, args.agents),
    "random": lambda args: gen_random_tdrpp(
        args.seed, args.vertices, args.arc_factor, args.service_frac),
}


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtrpp",
                     description="Exact solvers for multi-agent arc routing "
                                 "with timed track unavailabilities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_args(p):
        p.add_argument("instance", help="instance JSON file")
        p.add_argument("--epsilon", type=float, default=1e-6,
                       help="relative bound-gap tolerance (default 1e-6)")
        p.add_argument("--max-iterations", type=int, default=500)
        p.add_argument("--time-limit", type=float, default=None,
                       help="wall-clock limit in seconds")
        p.add_argument("--grid-step", default="1",
                       help="stamp width in minutes for the grid solver")
        p.add_argument("--grid-horizon", default=None,
                       help="planning horizon in minutes (grid solver only)")
        p.add_argument("--out", default=None, help="report file (default stdout)")
        p.add_argument("--figures", default=None, metavar="DIR",
                       help="also render figures into this directory")
        p.add_argument("--no-timing", action="store_true",
                       help="omit the runtime row for reproducible output")

    p_solve = sub.add_parser("solve", help="run one solver")
    add_solver_args(p_solve)
    p_solve.add_argument("--method", choices=METHODS, default="decomposition")
    p_solve.add_argument("--verbose", action="store_true",
                         help="log decomposition iterations to stderr")

    p_cmp = sub.add_parser("compare", help="run several solvers and diff them")
    add_solver_args(p_cmp)
    p_cmp.add_argument("--methods", default="decomposition,oracle",
                       help="comma-separated list (default decomposition,oracle)")
    p_cmp.add_argument("--tolerance", type=float, default=1e-6)

    p_gen = sub.add_parser("generate", help="write a built-in instance")
    p_gen.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--agents", type=int, default=2,
                       help="fleet size for the synthetic family")
    p_gen.add_argument("--vertices", type=int, default=20,
                       help="vertex count for the random family")
    p_gen.add_argument("--arc-factor", type=float, default=1.2)
    p_gen.add_argument("--service-frac", type=float, default=0.3)
    p_gen.add_argument("--out", default=None)

    p_val = sub.add_parser("validate", help="check an instance file")
    p_val.add_argument("instance")

    p_dot = sub.add_parser("export-dot", help="dump the layered route graph")
    p_dot.add_argument("instance")
    p_dot.add_argument("--out", default=None)
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_method(method: str, instance: Instance, args) -> SolveReport:
    if method == "decomposition":
        callback = None
        if getattr(args, "verbose", False):
            def callback(rec):
                gap = "-" if rec.gap is None else f"{rec.gap:.3g}"
                print(f"iteration {rec.index}: bounds "
                      f"[{rec.lower_bound:.6g}, {rec.upper_bound:.6g}] "
                      f"gap {gap} cuts +{rec.circulation_cuts}"
                      f"/+{rec.waiting_cuts}", file=sys.stderr)
        result = solve_mtrpp(instance, epsilon=args.epsilon,
                             max_iterations=args.max_iterations,
                             time_limit=args.time_limit,
                             on_iteration=callback)
        return from_decomposition(result, instance)
    if method == "grid":
        if args.grid_horizon is None:
            raise _CliError("the grid solver needs --grid-horizon")
        result = solve_on_grid(instance, parse_minutes(args.grid_step),
                               parse_minutes(args.grid_horizon),
                               time_limit=args.time_limit)
        return from_grid(result, instance)
    if method == "oracle":
        t0 = time.monotonic()
        result = oracle_solve(instance)
        return from_oracle(result, instance, time.monotonic() - t0)
    if method == "monolithic":
        t0 = time.monotonic()
        result = solve_monolithic(instance, time_limit=args.time_limit)
        return from_monolithic(result, instance, time.monotonic() - t0)
    raise _CliError(f"unknown method {method!r}")


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    rep = _run_method(args.method, instance, args)
    _write(rep.to_delimited(include_timing=not args.no_timing), args.out)
    if args.figures:
        figures.render_report_figures(instance, rep, args.figures)
    return rep.exit_code


def _cmd_compare(args) -> int:
    instance = load_instance(args.instance)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise _CliError(f"unknown method {m!r}; pick from "
                            f"{', '.join(METHODS)}")
    if len(methods) < 2:
        raise _CliError("compare needs at least two methods")
    reports = [_run_method(m, instance, args) for m in methods]
    table, agree = comparison_table(reports, tolerance=args.tolerance)
    body = "".join(r.to_delimited(include_timing=not args.no_timing) + "\n"
                   for r in reports)
    _write(body + table, args.out)
    if args.figures:
        for rep in reports:
            figures.render_report_figures(instance, rep, args.figures)
        try:
            figures.save_comparison(
                reports, f"{args.figures}/comparison.png")
        except ValueError:
            pass
    if not agree:
        return EXIT_MISMATCH
    return max(r.exit_code for r in reports)


def _cmd_generate(args) -> int:
    instance = FAMILIES[args.family](args)
    doc = instance_to_dict(instance)
    if args.out is None:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        save_instance(instance, args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    instance = load_instance(args.instance)
    violations = validate_well_defined(instance)
    if not violations:
        print(f"{args.instance}: structurally sound "
              f"({len(instance.vertices)} vertices, {len(instance.arcs)} arcs, "
              f"{len(instance.service_ids)} service arcs, "
              f"{len(instance.agents)} agents)")
        return EXIT_OK
    for v in violations:
        print(str(v))
    return 2


def _cmd_export_dot(args) -> int:
    instance = load_instance(args.instance)
    _write(ReplicatedGraph(instance).to_dot(), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "solve": _cmd_solve,
            "compare": _cmd_compare,
            "generate": _cmd_generate,
            "validate": _cmd_validate,
            "export-dot": _cmd_export_dot,
        }[args.command]
        return handler(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (InstanceError, OracleLimitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
