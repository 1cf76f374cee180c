"""Exact solvers for multi-agent arc routing with timed track unavailabilities.

The package models fleets of heterogeneous agents that must each traverse an
assigned subset of service arcs on a directed multigraph, where any arc can
be closed during known time windows.  It provides three independent solution
routes — a decomposition solver, a time-expanded network baseline, and a
brute-force enumerator — plus instance generators, validators, and a CLI.
"""

from .benders import DecompositionResult, solve_mtrpp
from .generate import gen_ex1, gen_ex2_synthetic, gen_random_tdrpp, gen_t1
from .instance import (
    Agent,
    Arc,
    Instance,
    InstanceError,
    PeriodicRule,
    Violation,
    Window,
    earliest_departure,
    instance_from_dict,
    instance_to_dict,
    is_departure_feasible,
    load_instance,
    save_instance,
    validate_well_defined,
)
from .monolithic import check_schedule, solve_monolithic
from .oracle import OracleLimitError, OracleResult, oracle_solve
from .replicated import ReplicatedGraph
from .report import SolveReport, comparison_table
from .timegrid import TimeGridNetwork, solve_on_grid

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "Arc",
    "DecompositionResult",
    "Instance",
    "InstanceError",
    "OracleLimitError",
    "OracleResult",
    "PeriodicRule",
    "ReplicatedGraph",
    "SolveReport",
    "TimeGridNetwork",
    "Violation",
    "Window",
    "check_schedule",
    "comparison_table",
    "earliest_departure",
    "gen_ex1",
    "gen_ex2_synthetic",
    "gen_random_tdrpp",
    "gen_t1",
    "instance_from_dict",
    "instance_to_dict",
    "is_departure_feasible",
    "load_instance",
    "oracle_solve",
    "save_instance",
    "solve_mtrpp",
    "solve_monolithic",
    "solve_on_grid",
    "validate_well_defined",
    "__version__",
]
