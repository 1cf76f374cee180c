"""Decomposition solver: route master problem plus exact timing subproblem.

The master problem picks one source-to-sink column path per agent in the
layered route graph and covers every service arc exactly once, minimizing a
surrogate objective z + sum of per-agent waiting surpluses d_k, where z is
bounded below by (beta + 1) times the selected running time (movement cost
plus the no-waiting completion bound).  The timing subproblem replays each
selected route against the outage calendar with exact rational arithmetic,
which yields a feasible schedule (an upper bound) and two families of lazy
constraints:

* circulation cuts — a selected set of deadhead copies forming a directed
  cycle can never be part of a schedulable route, since crossing times
  strictly increase along occupied arcs; each cycle found is forbidden in
  every layer of every agent;
* waiting cuts — when the replay has to hold a route at some arc, the
  accumulated waiting so far is charged to d_k whenever the delayed arc is
  selected and every alternative way into the route's earlier nodes is not;
  under those conditions any schedule is forced onto the identical prefix
  and provably waits at least as long.  Waiting cuts are copied to every
  agent that is interchangeable with the cut's owner (same depots, exits,
  and running times).

Bounds tighten monotonically; the loop stops when the exact upper bound and
the master bound meet within a relative tolerance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .instance import Instance, earliest_departure
from .milp import MilpModel
from .replicated import (
    KIND_DEADHEAD,
    Column,
    ReplicatedGraph,
)

DEFAULT_EPSILON = 1e-6


@dataclass
class IterationRecord:
    index: int
    lower_bound: float
    upper_bound: float | None
    gap: float | None
    circulation_cuts: int
    waiting_cuts: int
    master_nodes: int


@dataclass
class Correction:
    """One forced hold during the exact replay of a route."""
    position: int            # index into the simplified walk
    column: Column           # the delayed arc copy
    cumulative_wait: Fraction


@dataclass
class DecompositionResult:
    status: str                          # optimal | infeasible | iteration_limit | time_limit
    objective: Fraction | None
    lower_bound: float
    movement: Fraction | None
    completion: dict[str, Fraction]
    routes: dict[str, list[tuple[str, Fraction, Fraction]]]
    iterations: list[IterationRecord]
    n_circulation_cuts: int
    n_waiting_cuts: int
    initial_gap: float | None
    final_gap: float | None
    runtime: float

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def iteration_count(self) -> int:
        return len(self.iterations)


def relative_gap(upper: float | None, lower: float) -> float | None:
    if upper is None:
        return None
    return (upper - lower) / max(1.0, abs(upper))


def simplify_walk(walk: list[Column]) -> list[Column]:
    """Drop loops from a decoded walk so every node appears once.

    Whenever the walk returns to a node it has already visited, the columns
    in between form a circulation that only adds cost, so they are excised.
    """
    nodes = [walk[0].tail] if walk else []
    out: list[Column] = []
    position = {nodes[0]: 0} if walk else {}
    for col in walk:
        if col.head in position:
            keep = position[col.head]
            for dropped in nodes[keep + 1:]:
                del position[dropped]
            del nodes[keep + 1:]
            del out[keep:]
        else:
            position[col.head] = len(nodes)
            nodes.append(col.head)
            out.append(col)
    return out


def extract_circulations(graph: ReplicatedGraph, agent_id: str,
                         leftover: set[int]) -> list[list[Column]]:
    """Decompose leftover selected columns into directed cycles.

    The leftover of a balanced integral flow minus its source-sink walk is a
    union of node-disjoint-by-arc circulations; repeatedly following the
    lowest-index unused column from the smallest remaining column's tail
    peels them off deterministically.
    """
    remaining = sorted(leftover)
    unused = set(remaining)
    by_tail: dict[int, list[int]] = {}
    for i in remaining:
        by_tail.setdefault(graph.columns[i].tail, []).append(i)
    cycles = []
    for start in remaining:
        if start not in unused:
            continue
        cycle = [start]
        unused.discard(start)
        node = graph.columns[start].head
        origin = graph.columns[start].tail
        while node != origin:
            nxt = next(i for i in by_tail.get(node, []) if i in unused)
            unused.discard(nxt)
            cycle.append(nxt)
            node = graph.columns[nxt].head
        cycles.append([graph.columns[i] for i in cycle])
    return cycles


def replay_route(instance: Instance, walk: list[Column]
                 ) -> tuple[Fraction, Fraction,
                            list[tuple[str, Fraction, Fraction]],
                            list[Correction]]:
    """Exact earliest-departure replay of one agent's simplified walk.

    Returns (movement weight, completion time, physical route legs,
    corrections).  Virtual columns take no time; the completion time is the
    arrival at the chosen exit vertex (zero for an unused agent).
    """
    t = Fraction(0)
    movement = Fraction(0)
    waited = Fraction(0)
    legs: list[tuple[str, Fraction, Fraction]] = []
    corrections: list[Correction] = []
    for pos, col in enumerate(walk):
        if not col.is_real:
            continue
        arc = instance.arc(col.arc_id)
        depart = earliest_departure(arc, col.weight, t)
        if depart > t:
            waited += depart - t
            corrections.append(Correction(pos, col, waited))
        t = depart + col.weight
        movement += col.weight
        legs.append((col.arc_id, depart, t))
    return movement, t, legs, corrections


def homogeneity_classes(instance: Instance) -> dict[str, list[str]]:
    """Map each agent to the agents interchangeable with it (itself included)."""
    signature = {}
    for k in instance.agents:
        runtimes = tuple(instance.running_time(k.id, a.id) for a in instance.arcs)
        signature[k.id] = (k.depots, k.exits, runtimes)
    return {k: [other for other in signature
                if signature[other] == signature[k]]
            for k in signature}


class _Master:
    """Incrementally extended route-selection MILP."""

    def __init__(self, graph: ReplicatedGraph):
        self.graph = graph
        inst = graph.instance
        self.model = MilpModel()
        for c in graph.columns:
            self.model.add_binary(f"x{c.index}")
        self.z = self.model.add_column("z", objective=1.0)
        self.d = {k.id: self.model.add_column(f"d_{k.id}", objective=1.0)
                  for k in inst.agents}
        # flow conservation at every node
        rows: dict[int, dict[int, float]] = {n.index: {} for n in graph.nodes}
        for c in graph.columns:
            rows[c.tail][c.index] = rows[c.tail].get(c.index, 0.0) - 1.0
            rows[c.head][c.index] = rows[c.head].get(c.index, 0.0) + 1.0
        rhs = graph.flow_rhs()
        for n in graph.nodes:
            self.model.add_row(rows[n.index], "==", float(rhs[n.index]))
        # each service arc is crossed exactly once, fleet-wide
        for _, cols in graph.service_requirement_rows():
            self.model.add_row({i: 1.0 for i in cols}, "==", 1.0)
        # z covers movement cost plus the waiting-free completion bound
        factor = float(inst.beta) + 1.0
        coeffs = {self.z: 1.0}
        for c in graph.columns:
            if c.weight:
                coeffs[c.index] = -factor * float(c.weight)
        self.model.add_row(coeffs, ">=", 0.0)
        self._seen_cuts: set[tuple] = set()

    def solve(self, time_limit=None):
        return self.model.solve(time_limit=time_limit)

    def add_circulation_cut(self, columns: list[Column]) -> bool:
        key = ("circ", frozenset(c.index for c in columns))
        if key in self._seen_cuts:
            return False
        self._seen_cuts.add(key)
        self.model.add_row({c.index: 1.0 for c in columns}, "<=",
                           float(len(columns) - 1))
        return True

    def add_waiting_cut(self, agent_id: str, trigger: Column,
                        neighbors: list[Column], delay: Fraction) -> bool:
        key = ("wait", agent_id, trigger.index,
               frozenset(c.index for c in neighbors), delay)
        if key in self._seen_cuts:
            return False
        self._seen_cuts.add(key)
        dy = float(delay)
        coeffs = {self.d[agent_id]: 1.0, trigger.index: -dy}
        for c in neighbors:
            coeffs[c.index] = coeffs.get(c.index, 0.0) + dy
        self.model.add_row(coeffs, ">=", 0.0)
        return True


def _waiting_cut_terms(graph: ReplicatedGraph, walk: list[Column],
                       correction: Correction) -> tuple[Column, list[Column]]:
    """Trigger column and alternative-entry columns for one correction.

    The prefix nodes are everything the walk visits strictly before the
    delayed arc's head.  Any other column of the same agent whose head is a
    prefix node is an alternative entry; while all of them stay unselected,
    a schedule containing the trigger must replicate the prefix exactly.
    """
    trigger = correction.column
    pos = correction.position
    prefix_nodes = {walk[0].tail}
    prefix_nodes.update(c.head for c in walk[:pos])
    prefix_columns = {c.index for c in walk[:pos + 1]}
    neighbors = [c for c in graph.columns
                 if c.agent_id == trigger.agent_id
                 and c.head in prefix_nodes
                 and c.index not in prefix_columns]
    return trigger, neighbors


def solve_mtrpp(instance: Instance, epsilon: float = DEFAULT_EPSILON,
                max_iterations: int = 500, time_limit: float | None = None,
                on_iteration=None) -> DecompositionResult:
    """Solve an instance exactly by lazy-cut decomposition.

    epsilon is the relative bound-gap tolerance for declaring optimality.
    on_iteration, when given, receives each IterationRecord as it is made.
    """
    start = time.monotonic()
    graph = ReplicatedGraph(instance)
    master = _Master(graph)
    classes = homogeneity_classes(instance)
    lookup = graph.column_lookup()

    best_upper: Fraction | None = None
    best_routes: dict[str, list] = {}
    best_movement: Fraction | None = None
    best_completion: dict[str, Fraction] = {}
    lower = 0.0
    records: list[IterationRecord] = []
    n_circ = 0
    n_wait = 0
    status = "iteration_limit"

    for index in range(1, max_iterations + 1):
        remaining = None
        if time_limit is not None:
            remaining = time_limit - (time.monotonic() - start)
            if remaining <= 0:
                status = "time_limit"
                break
        sol = master.solve(time_limit=remaining)
        if sol.status == "infeasible":
            return DecompositionResult(
                "infeasible", None, float("inf"), None, {}, {}, records,
                n_circ, n_wait, None, None, time.monotonic() - start)
        if sol.status == "time_limit":
            status = "time_limit"
            if sol.x is None:
                break
        lower = max(lower, sol.best_bound)
        selected = {i for i in range(len(graph.columns)) if sol.x[i] > 0.5}

        new_circ = 0
        new_wait = 0
        movement_total = Fraction(0)
        completion: dict[str, Fraction] = {}
        routes: dict[str, list] = {}
        for agent in instance.agents:
            walk, leftover = graph.walk_from_source(agent.id, selected)
            for cycle in extract_circulations(graph, agent.id, leftover):
                parents = [c.arc_id for c in cycle]
                for other in instance.agents:
                    for layer in range(1, graph.num_layers + 1):
                        copies = [lookup[(other.id, KIND_DEADHEAD, a, layer)]
                                  for a in parents]
                        if master.add_circulation_cut(copies):
                            new_circ += 1
            simple = simplify_walk(walk)
            if len(simple) < len(walk):
                # the walk itself loops; forbid each excised circulation too
                excised = {c.index for c in walk} - {c.index for c in simple}
                for cycle in extract_circulations(graph, agent.id, excised):
                    parents = [c.arc_id for c in cycle]
                    for other in instance.agents:
                        for layer in range(1, graph.num_layers + 1):
                            copies = [lookup[(other.id, KIND_DEADHEAD, a, layer)]
                                      for a in parents]
                            if master.add_circulation_cut(copies):
                                new_circ += 1
            movement, finish, legs, corrections = replay_route(instance, simple)
            movement_total += movement
            completion[agent.id] = finish
            routes[agent.id] = legs
            for corr in corrections:
                trigger, neighbors = _waiting_cut_terms(graph, simple, corr)
                for twin_id in classes[agent.id]:
                    if twin_id == agent.id:
                        if master.add_waiting_cut(agent.id, trigger, neighbors,
                                                  corr.cumulative_wait):
                            new_wait += 1
                    else:
                        t_twin = graph.corresponding_column(trigger, twin_id)
                        n_twin = [graph.corresponding_column(c, twin_id)
                                  for c in neighbors]
                        if master.add_waiting_cut(twin_id, t_twin, n_twin,
                                                  corr.cumulative_wait):
                            new_wait += 1
        n_circ += new_circ
        n_wait += new_wait

        upper = instance.beta * movement_total + sum(completion.values(),
                                                     Fraction(0))
        if best_upper is None or upper < best_upper:
            best_upper = upper
            best_routes = routes
            best_movement = movement_total
            best_completion = completion

        gap = relative_gap(float(best_upper), lower)
        record = IterationRecord(index, lower, float(best_upper), gap,
                                 new_circ, new_wait, sol.node_count)
        records.append(record)
        if on_iteration is not None:
            on_iteration(record)
        if status == "time_limit":
            break
        if gap is not None and gap <= epsilon:
            status = "optimal"
            break

    runtime = time.monotonic() - start
    initial_gap = records[0].gap if records else None
    final_gap = records[-1].gap if records else None
    return DecompositionResult(
        status, best_upper, lower, best_movement, best_completion,
        best_routes, records, n_circ, n_wait, initial_gap, final_gap, runtime)
