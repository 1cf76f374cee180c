"""Uniform solve reports with tab-delimited rendering.

Every solver's result is normalized into a SolveReport so the command line
can print, compare, and plot them the same way.  Rendering is deterministic:
times are written exactly (integers, lossless decimals, or p/q), rows come
out in a fixed order, and the timing row can be dropped to make reports
byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .benders import DecompositionResult
from .instance import Instance, minutes_to_json
from .monolithic import MonolithicResult
from .oracle import OracleResult
from .timegrid import TimeGridResult

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3
EXIT_MISMATCH = 4


def status_exit_code(status: str) -> int:
    if status == "optimal":
        return EXIT_OK
    if status == "infeasible":
        return EXIT_INFEASIBLE
    return EXIT_LIMIT


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, Fraction):
        return str(minutes_to_json(value))
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


@dataclass
class SolveReport:
    solver: str
    status: str
    objective: Fraction | float | None
    movement: Fraction | None = None
    completion: dict[str, Fraction] = field(default_factory=dict)
    routes: dict[str, list[tuple[str, Fraction, Fraction]]] = field(
        default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    bounds: dict[str, float] = field(default_factory=dict)
    iterations: list[tuple] = field(default_factory=list)
    runtime: float | None = None

    @property
    def exit_code(self) -> int:
        return status_exit_code(self.status)

    def to_delimited(self, include_timing: bool = True) -> str:
        lines = ["# solve report"]
        lines.append(f"solver\t{self.solver}")
        lines.append(f"status\t{self.status}")
        lines.append(f"objective\t{_fmt(self.objective)}")
        lines.append(f"movement\t{_fmt(self.movement)}")
        for agent in sorted(self.completion):
            lines.append(f"completion[{agent}]\t{_fmt(self.completion[agent])}")
        for key in sorted(self.counts):
            lines.append(f"{key}\t{self.counts[key]}")
        for key in sorted(self.bounds):
            lines.append(f"{key}\t{_fmt(self.bounds[key])}")
        if include_timing and self.runtime is not None:
            lines.append(f"runtime_seconds\t{self.runtime:.3f}")
        if self.routes:
            lines.append("# routes")
            lines.append("agent\tarc\tdepart\tarrive")
            for agent in sorted(self.routes):
                for arc_id, depart, arrive in self.routes[agent]:
                    lines.append(f"{agent}\t{arc_id}\t{_fmt(depart)}"
                                 f"\t{_fmt(arrive)}")
        if self.iterations:
            lines.append("# iterations")
            lines.append("iteration\tlower_bound\tupper_bound\tgap"
                         "\tcirculation_cuts\twaiting_cuts")
            for row in self.iterations:
                lines.append("\t".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"


def _instance_counts(instance: Instance) -> dict[str, int]:
    return {
        "n_vertices": len(instance.vertices),
        "n_arcs": len(instance.arcs),
        "n_service_arcs": len(instance.service_ids),
        "n_agents": len(instance.agents),
    }


def from_decomposition(result: DecompositionResult,
                       instance: Instance) -> SolveReport:
    counts = _instance_counts(instance)
    counts["n_circulation_cuts"] = result.n_circulation_cuts
    counts["n_waiting_cuts"] = result.n_waiting_cuts
    counts["n_iterations"] = result.iteration_count
    bounds = {"lower_bound": result.lower_bound}
    if result.initial_gap is not None:
        bounds["initial_gap"] = result.initial_gap
    if result.final_gap is not None:
        bounds["final_gap"] = result.final_gap
    iterations = [(r.index, r.lower_bound, r.upper_bound, r.gap,
                   r.circulation_cuts, r.waiting_cuts)
                  for r in result.iterations]
    return SolveReport("decomposition", result.status, result.objective,
                       result.movement, result.completion, result.routes,
                       counts, bounds, iterations, result.runtime)


def from_grid(result: TimeGridResult, instance: Instance) -> SolveReport:
    counts = _instance_counts(instance)
    counts["n_grid_variables"] = result.num_variables
    counts["n_grid_constraints"] = result.num_constraints
    return SolveReport("grid", result.status, result.objective,
                       result.movement, result.completion, result.routes,
                       counts, {}, [], result.runtime)


def from_oracle(result: OracleResult, instance: Instance,
                runtime: float | None = None) -> SolveReport:
    counts = _instance_counts(instance)
    counts["n_evaluated_routes"] = result.evaluated_routes
    return SolveReport("oracle", result.status, result.objective,
                       result.movement, result.completion, result.routes,
                       counts, {}, [], runtime)


def from_monolithic(result: MonolithicResult, instance: Instance,
                    runtime: float | None = None) -> SolveReport:
    return SolveReport("monolithic", result.status, result.objective,
                       None, {}, result.routes, _instance_counts(instance),
                       {}, [], runtime)


def comparison_table(reports: list[SolveReport],
                     tolerance: float = 1e-6) -> tuple[str, bool]:
    """Tab-delimited side-by-side summary and an agreement verdict.

    Two reports disagree when both carry an objective and the values differ
    by more than tolerance (relative to the larger magnitude, floored at 1),
    or when exactly one of them proved infeasibility.
    """
    lines = ["# comparison", "solver\tstatus\tobjective"]
    for r in reports:
        lines.append(f"{r.solver}\t{r.status}\t{_fmt(r.objective)}")
    values = [float(r.objective) for r in reports if r.objective is not None]
    statuses = {r.status for r in reports}
    agree = True
    if len(values) >= 2:
        spread = max(values) - min(values)
        if spread > tolerance * max(1.0, max(abs(v) for v in values)):
            agree = False
            lines.append(f"# objectives differ by {spread:.9g}")
    if "infeasible" in statuses and any(
            r.objective is not None for r in reports):
        agree = False
        lines.append("# solvers disagree on feasibility")
    lines.append(f"agreement\t{'yes' if agree else 'no'}")
    return "\n".join(lines) + "\n", agree
