"""Single mixed-integer model over the layered graph, for cross-checking.

Solves the whole problem in one MILP: binary column choices, one continuous
departure time per node, and one disjunction binary per (arc copy, outage)
pair choosing "leave before the outage threatens the crossing" or "leave
after it clears".  Big-M constants make it slow, so it exists to validate
the other solvers on small instances, not to compete with them.

Also home to check_schedule(), an arithmetic-only validator that replays a
claimed schedule against the raw instance data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .instance import Instance, windows_until
from .milp import MilpModel, MilpSolution
from .replicated import KIND_SHORTCUT, KIND_SINK, KIND_SOURCE, ReplicatedGraph


@dataclass
class MonolithicResult:
    status: str
    objective: float | None
    routes: dict[str, list[tuple[str, Fraction, Fraction]]]
    node_count: int

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def _horizon(instance: Instance) -> Fraction:
    """A time bound no sensible schedule exceeds.

    Pure travel is bounded by every agent crossing every deadhead copy in
    every layer plus every service arc; each crossing can additionally wait
    for at most one outage to clear.  The bound feeds back into how far
    repeating outages must be expanded, so iterate to a fixpoint.
    """
    layers = len(instance.service_ids) + 1
    travel = Fraction(0)
    for k in instance.agents:
        for a in instance.deadhead_arcs():
            travel += layers * instance.running_time(k.id, a.id)
        for a in instance.service_arcs():
            travel += instance.running_time(k.id, a.id)
    crossings = sum(layers * len(instance.deadhead_arcs())
                    + len(instance.service_ids) for _ in instance.agents)
    horizon = travel + 1
    while True:
        top = Fraction(0)
        for a in instance.arcs:
            for w in windows_until(a, horizon):
                top = max(top, w.upper)
        new_horizon = travel + crossings * max(top, Fraction(1)) + 1
        if new_horizon <= horizon:
            return horizon
        horizon = new_horizon


def _build_model(instance: Instance, graph: ReplicatedGraph,
                 horizon: Fraction) -> tuple[MilpModel, list[int], list[int]]:
    """Assemble the full model; returns (model, column vars, node-time vars)."""
    tau = float(horizon)
    model = MilpModel()
    beta = float(instance.beta)

    x = [model.add_binary(f"x{c.index}", objective=beta * float(c.weight))
         for c in graph.columns]
    y = [model.add_column(f"y{n.index}", lower=0.0, upper=tau)
         for n in graph.nodes]
    for k in instance.agents:
        model.set_objective_coeff(y[graph.sink_id(k.id)], 1.0)
        # the clock starts at zero when the agent is dispatched
        model.add_row({y[graph.source_id(k.id)]: 1.0}, "==", 0.0)

    # flow conservation and fleet-wide service coverage
    rows: dict[int, dict[int, float]] = {n.index: {} for n in graph.nodes}
    for c in graph.columns:
        rows[c.tail][x[c.index]] = rows[c.tail].get(x[c.index], 0.0) - 1.0
        rows[c.head][x[c.index]] = rows[c.head].get(x[c.index], 0.0) + 1.0
    rhs = graph.flow_rhs()
    for n in graph.nodes:
        model.add_row(rows[n.index], "==", float(rhs[n.index]))
    for _, cols in graph.service_requirement_rows():
        model.add_row({x[i]: 1.0 for i in cols}, "==", 1.0)

    # time propagates along every selected column
    for c in graph.columns:
        model.add_row({y[c.head]: 1.0, y[c.tail]: -1.0, x[c.index]: -tau},
                      ">=", float(c.weight) - tau)

    # outage disjunctions: for a selected copy, either leave the tail by
    # lo - W (crossing clears before the outage) or at hi or later;
    # y <= early + tau*delta + tau*(1-x)  and  y >= late - tau*(1-delta) - tau*(1-x)
    for c in graph.columns:
        if not c.is_real:
            continue
        arc = instance.arc(c.arc_id)
        for w in windows_until(arc, horizon):
            delta = model.add_binary(f"o{c.index}_{w.lower}")
            early = float(w.lower - c.weight)
            late = float(w.upper)
            model.add_row({y[c.tail]: 1.0, delta: -tau, x[c.index]: tau},
                          "<=", early + tau)
            model.add_row({y[c.tail]: 1.0, delta: -tau, x[c.index]: -tau},
                          ">=", late - 2 * tau)
    return model, x, y


def model_dimensions(instance: Instance) -> dict[str, int]:
    """Variable and constraint counts of the assembled model."""
    graph = ReplicatedGraph(instance)
    model, _, _ = _build_model(instance, graph, _horizon(instance))
    integer = sum(model.integral)
    return {
        "continuous_variables": model.num_columns - integer,
        "integer_variables": integer,
        "constraints": model.num_rows,
    }


def solve_monolithic(instance: Instance,
                     time_limit: float | None = None) -> MonolithicResult:
    graph = ReplicatedGraph(instance)
    model, x, y = _build_model(instance, graph, _horizon(instance))
    sol: MilpSolution = model.solve(time_limit=time_limit)
    if sol.status != "optimal":
        return MonolithicResult(sol.status, sol.objective, {}, sol.node_count)

    selected = {c.index for c in graph.columns if sol.x[x[c.index]] > 0.5}
    routes: dict[str, list] = {}
    for k in instance.agents:
        walk, _ = graph.walk_from_source(k.id, selected)
        legs = []
        for col in walk:
            if col.is_real:
                depart = Fraction(str(round(sol.x[y[col.tail]], 9)))
                legs.append((col.arc_id, depart, depart + col.weight))
        routes[k.id] = legs
    return MonolithicResult("optimal", sol.objective, routes, sol.node_count)


# ---------------------------------------------------------------------------
# schedule validation

def check_schedule(instance: Instance,
                   routes: dict[str, list[tuple[str, Fraction, Fraction]]],
                   ) -> list[str]:
    """Replay a claimed schedule against the raw data; returns problem list.

    Checks per agent: the route starts at a depot, ends at an exit, legs
    chain tail-to-head, departures never precede the previous arrival, every
    crossing takes exactly its running time and never overlaps an outage.
    Fleet-wide: every service arc is crossed exactly once and deadhead-only
    arcs are free to repeat.
    """
    problems: list[str] = []
    service_count: dict[str, int] = {s: 0 for s in instance.service_ids}
    for k in instance.agents:
        legs = routes.get(k.id, [])
        if not legs:
            continue
        first = instance.arc(legs[0][0])
        if first.tail not in k.depots:
            problems.append(f"{k.id}: route starts at {first.tail!r}, "
                            f"not a depot")
        last = instance.arc(legs[-1][0])
        if last.head not in k.exits:
            problems.append(f"{k.id}: route ends at {last.head!r}, not an exit")
        clock = Fraction(0)
        at = first.tail
        for arc_id, depart, arrive in legs:
            arc = instance.arc(arc_id)
            w = instance.running_time(k.id, arc_id)
            if arc.tail != at:
                problems.append(f"{k.id}: leg {arc_id} starts at {arc.tail!r}, "
                                f"agent is at {at!r}")
            if depart < clock:
                problems.append(f"{k.id}: leg {arc_id} departs {depart} "
                                f"before ready time {clock}")
            if arrive - depart != w:
                problems.append(f"{k.id}: leg {arc_id} takes {arrive - depart}, "
                                f"running time is {w}")
            for win in windows_until(arc, arrive):
                if win.lower - w < depart < win.upper:
                    problems.append(
                        f"{k.id}: leg {arc_id} departing {depart} crosses the "
                        f"outage ({win.lower}, {win.upper})")
            if arc_id in service_count:
                service_count[arc_id] += 1
            clock = arrive
            at = arc.head
    for s, count in service_count.items():
        if count != 1:
            problems.append(f"service arc {s} crossed {count} times")
    return problems
