"""Baseline solver on a time-expanded grid.

Discretizes the horizon into equal stamps and lays the problem out as one
binary multicommodity flow: each agent gets a copy of every vertex at every
stamp, a movement copy of every arc at every departure stamp whose crossing
both fits the horizon and clears every outage, waiting arcs between
consecutive stamps, a source feeding its depots at stamp zero, and sink arcs
that leave any exit vertex at any stamp for a virtual sink at a cost equal
to the stamp.  Service arcs are covered exactly once fleet-wide.

Running times and the horizon must be whole multiples of the stamp width;
outage limits may fall anywhere, because departures are checked against the
exact rational outage data rather than snapped to the grid.  The decoded
objective is recomputed exactly from the chosen departures, so grid
optimality is certified independently of solver floating point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .instance import Instance, is_departure_feasible, parse_minutes
from .milp import MilpModel


@dataclass(frozen=True)
class GridArc:
    index: int
    agent_id: str
    kind: str                 # "move" | "wait" | "source" | "sink"
    arc_id: str | None
    tail: int
    head: int
    depart: Fraction          # stamp the arc leaves its tail (0 for source)
    weight: Fraction          # running time for movement copies


@dataclass
class TimeGridResult:
    status: str
    objective: Fraction | None
    movement: Fraction | None
    completion: dict[str, Fraction]
    routes: dict[str, list[tuple[str, Fraction, Fraction]]]
    num_variables: int
    num_constraints: int
    node_count: int
    runtime: float

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class TimeGridNetwork:
    """The expanded network; exposes sizes before solving."""

    def __init__(self, instance: Instance, dt, horizon):
        self.instance = instance
        self.dt = parse_minutes(dt)
        self.horizon = parse_minutes(horizon)
        if self.dt <= 0 or self.horizon <= 0:
            raise ValueError("stamp width and horizon must be positive")
        steps = self.horizon / self.dt
        if steps.denominator != 1:
            raise ValueError("horizon must be a whole number of stamps")
        self.n_steps = int(steps)
        for (k, a), w in instance.running_times.items():
            if (w / self.dt).denominator != 1:
                raise ValueError(
                    f"running time of {k}:{a} ({w}) is not a multiple of the "
                    f"stamp width {self.dt}")
        self.nodes: list[tuple] = []
        self.arcs: list[GridArc] = []
        self._node_index: dict[tuple, int] = {}
        self._build()

    def _node(self, key) -> int:
        if key not in self._node_index:
            self._node_index[key] = len(self.nodes)
            self.nodes.append(key)
        return self._node_index[key]

    def _add_arc(self, agent_id, kind, arc_id, tail, head, depart, weight):
        self.arcs.append(GridArc(len(self.arcs), agent_id, kind, arc_id,
                                 tail, head, depart, weight))

    def stamp(self, i: int) -> Fraction:
        return i * self.dt

    def _build(self):
        inst = self.instance
        n = self.n_steps
        for agent in inst.agents:
            k = agent.id
            source = self._node((k, "source"))
            sink = self._node((k, "sink"))
            for v in inst.vertices:
                for i in range(n + 1):
                    self._node((k, v, i))
            for a in inst.arcs:
                w = inst.running_time(k, a.id)
                span = int(w / self.dt)
                for i in range(n + 1):
                    t = self.stamp(i)
                    if i + span > n:
                        break
                    if not is_departure_feasible(a, w, t):
                        continue
                    self._add_arc(k, "move", a.id,
                                  self._node((k, a.tail, i)),
                                  self._node((k, a.head, i + span)), t, w)
            for v in inst.vertices:
                for i in range(n):
                    self._add_arc(k, "wait", None,
                                  self._node((k, v, i)),
                                  self._node((k, v, i + 1)),
                                  self.stamp(i), Fraction(0))
            for v in agent.depots:
                self._add_arc(k, "source", None, source,
                              self._node((k, v, 0)), Fraction(0), Fraction(0))
            for v in agent.exits:
                for i in range(n + 1):
                    self._add_arc(k, "sink", None,
                                  self._node((k, v, i)), sink,
                                  self.stamp(i), Fraction(0))

    @property
    def num_variables(self) -> int:
        return len(self.arcs)

    @property
    def num_constraints(self) -> int:
        # one balance row per timed node, one source and one sink row per
        # agent, one fleet-wide row per service arc
        timed = len(self.instance.vertices) * (self.n_steps + 1)
        return (timed + 2) * len(self.instance.agents) \
            + len(self.instance.service_ids)


def solve_on_grid(instance: Instance, dt, horizon,
                  time_limit: float | None = None) -> TimeGridResult:
    start = time.monotonic()
    net = TimeGridNetwork(instance, dt, horizon)
    inst = instance
    beta = float(inst.beta)

    model = MilpModel()
    for g in net.arcs:
        if g.kind == "move":
            cost = beta * float(g.weight)
        elif g.kind == "sink":
            cost = float(g.depart)
        else:
            cost = 0.0
        model.add_binary(f"g{g.index}", objective=cost)

    balance: dict[int, dict[int, float]] = {i: {} for i in range(len(net.nodes))}
    for g in net.arcs:
        balance[g.tail][g.index] = balance[g.tail].get(g.index, 0.0) - 1.0
        balance[g.head][g.index] = balance[g.head].get(g.index, 0.0) + 1.0
    for i, key in enumerate(net.nodes):
        rhs = 0.0
        if key[1] == "source":
            rhs = -1.0
        elif key[1] == "sink":
            rhs = 1.0
        model.add_row(balance[i], "==", rhs)
    for s in inst.service_ids:
        members = {g.index: 1.0 for g in net.arcs
                   if g.kind == "move" and g.arc_id == s}
        model.add_row(members, "==", 1.0)

    sol = model.solve(time_limit=time_limit)
    runtime = time.monotonic() - start
    if sol.status != "optimal":
        return TimeGridResult(sol.status, None, None, {}, {},
                              net.num_variables, net.num_constraints,
                              sol.node_count, runtime)

    selected = [g for g in net.arcs if sol.x[g.index] > 0.5]
    routes: dict[str, list] = {}
    completion: dict[str, Fraction] = {}
    movement = Fraction(0)
    for agent in inst.agents:
        k = agent.id
        mine = {g.index: g for g in selected if g.agent_id == k}
        by_tail = {}
        for g in mine.values():
            by_tail.setdefault(g.tail, []).append(g)
        node = net._node_index[(k, "source")]
        sink = net._node_index[(k, "sink")]
        legs = []
        finish = Fraction(0)
        guard = 0
        while node != sink:
            g = sorted(by_tail.get(node, []), key=lambda g: g.index)[0]
            if g.kind == "move":
                legs.append((g.arc_id, g.depart, g.depart + g.weight))
                movement += g.weight
            elif g.kind == "sink":
                finish = g.depart
            node = g.head
            guard += 1
            if guard > len(net.arcs):
                raise RuntimeError("grid decoding failed to reach the sink")
        routes[k] = legs
        completion[k] = finish
    objective = inst.beta * movement + sum(completion.values(), Fraction(0))
    return TimeGridResult("optimal", objective, movement, completion, routes,
                          net.num_variables, net.num_constraints,
                          sol.node_count, runtime)
