"""Brute-force reference solver.

Enumerates every way to split the service arcs among the agents, every
service order per agent, every depot/exit choice, and every vertex-simple
deadhead path between consecutive stops, then times each candidate route
greedily.  Intended as ground truth for small instances: other solvers are
tested against it, so it deliberately shares no code with them beyond the
raw window data — feasibility and waiting are recomputed here from scratch
with a candidate-departure construction instead of the scan the solvers use.

Dropping non-simple connecting segments is safe: waiting at a vertex is free
and unrestricted, and delaying an arrival never helps later departures, so
any walk that revisits a vertex can shed the loop without raising its cost.
An agent with no assigned service arcs stays unused at zero cost, which is
never worse than moving.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .instance import Instance, InstanceError, iter_windows

_GUARD = 100_000


class OracleLimitError(RuntimeError):
    """The instance is too large for exhaustive enumeration."""


@dataclass
class OracleResult:
    status: str                                   # "optimal" | "infeasible"
    objective: Fraction | None
    movement: Fraction | None
    completion: dict[str, Fraction]
    routes: dict[str, list[tuple[str, Fraction, Fraction]]]
    evaluated_routes: int

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def _earliest_departure(arc, running_time: Fraction, arrival: Fraction) -> Fraction:
    """Independent reimplementation of the outage semantics.

    Builds the candidate set {arrival} plus the upper limits of every outage
    that could interfere, then returns the smallest feasible candidate.  A
    departure t conflicts with an outage (lo, hi) iff lo - running_time < t < hi.
    """
    candidates = [arrival]
    relevant = []
    top = arrival
    for i, w in enumerate(iter_windows(arc)):
        if w.lower - running_time >= top:
            break
        relevant.append(w)
        if w.upper > arrival:
            candidates.append(w.upper)
            top = max(top, w.upper)
        if i >= _GUARD:
            raise InstanceError(
                f"arc {arc.id!r} never frees up for a crossing of length "
                f"{running_time} after {arrival}")

    def ok(t):
        return all(not (w.lower - running_time < t < w.upper) for w in relevant)

    return min(t for t in candidates if t >= arrival and ok(t))


def _time_route(instance: Instance, agent_id: str, arc_ids: list[str],
                ) -> tuple[Fraction, Fraction, list[tuple[str, Fraction, Fraction]]]:
    """Greedy earliest timing of a fixed arc sequence from time zero.

    Returns (movement weight, completion time, per-arc (id, depart, arrive)).
    """
    t = Fraction(0)
    movement = Fraction(0)
    log = []
    for arc_id in arc_ids:
        arc = instance.arc(arc_id)
        w = instance.running_time(agent_id, arc_id)
        depart = _earliest_departure(arc, w, t)
        t = depart + w
        movement += w
        log.append((arc_id, depart, t))
    return movement, t, log


def _simple_paths(instance: Instance, start: str, goal: str,
                  ) -> list[list[str]]:
    """All vertex-simple deadhead paths start -> goal as arc-id sequences."""
    out_arcs: dict[str, list] = {v: [] for v in instance.vertices}
    for a in instance.deadhead_arcs():
        out_arcs[a.tail].append(a)
    paths: list[list[str]] = []

    def extend(v, visited, acc):
        if v == goal:
            # a vertex-simple path cannot revisit the goal, so stop here;
            # start == goal yields exactly the empty "stay in place" segment
            paths.append(list(acc))
            return
        for a in out_arcs[v]:
            if a.head in visited:
                continue
            visited.add(a.head)
            acc.append(a.id)
            extend(a.head, visited, acc)
            acc.pop()
            visited.remove(a.head)

    extend(start, {start}, [])
    return paths


def oracle_solve(instance: Instance, max_routes: int = 2_000_000) -> OracleResult:
    """Exhaustively minimize movement-plus-completion cost.

    The objective is beta times the total running time of every traversed
    arc, plus each agent's arrival time at its chosen exit (unused agents
    contribute zero).  Raises OracleLimitError when the number of timed
    candidate routes would exceed max_routes.
    """
    services = list(instance.service_ids)
    agents = [k.id for k in instance.agents]
    agent_by_id = {k.id: k for k in instance.agents}

    path_cache: dict[tuple[str, str], list[list[str]]] = {}

    def paths_between(u, v):
        if (u, v) not in path_cache:
            path_cache[(u, v)] = _simple_paths(instance, u, v)
        return path_cache[(u, v)]

    evaluated = 0

    def best_route(agent_id: str, ordered: tuple[str, ...]):
        """Cheapest timed route covering the given services in order."""
        nonlocal evaluated
        agent = agent_by_id[agent_id]
        best = None
        arcs_of = {s: instance.arc(s) for s in ordered}
        for depot in agent.depots:
            for exit_v in agent.exits:
                waypoints = [depot]
                for s in ordered:
                    waypoints.append(arcs_of[s].tail)
                    waypoints.append(arcs_of[s].head)
                waypoints.append(exit_v)
                leg_paths = []
                feasible = True
                for i in range(0, len(waypoints) - 1, 2):
                    options = paths_between(waypoints[i], waypoints[i + 1])
                    if not options:
                        feasible = False
                        break
                    leg_paths.append(options)
                if not feasible:
                    continue
                for combo in itertools.product(*leg_paths):
                    seq: list[str] = []
                    for i, leg in enumerate(combo):
                        seq.extend(leg)
                        if i < len(ordered):
                            seq.append(ordered[i])
                    evaluated += 1
                    if evaluated > max_routes:
                        raise OracleLimitError(
                            f"enumeration exceeded {max_routes} candidate routes")
                    movement, completion, log = _time_route(
                        instance, agent_id, seq)
                    cost = instance.beta * movement + completion
                    if best is None or cost < best[0]:
                        best = (cost, movement, completion, log)
        return best

    subset_best: dict[tuple[str, frozenset], tuple] = {}

    def best_for_subset(agent_id: str, subset: frozenset):
        key = (agent_id, subset)
        if key in subset_best:
            return subset_best[key]
        if not subset:
            result = (Fraction(0), Fraction(0), Fraction(0), [])
        else:
            result = None
            for ordered in itertools.permutations(sorted(subset)):
                cand = best_route(agent_id, ordered)
                if cand is not None and (result is None or cand[0] < result[0]):
                    result = cand
        subset_best[key] = result
        return result

    best_total = None
    best_parts: dict[str, tuple] | None = None
    for assignment in itertools.product(agents, repeat=len(services)):
        parts: dict[str, frozenset] = {
            k: frozenset(s for s, owner in zip(services, assignment) if owner == k)
            for k in agents}
        total = Fraction(0)
        chosen = {}
        ok = True
        for k in agents:
            cand = best_for_subset(k, parts[k])
            if cand is None:
                ok = False
                break
            total += cand[0]
            chosen[k] = cand
        if ok and (best_total is None or total < best_total):
            best_total = total
            best_parts = chosen

    if best_total is None:
        return OracleResult("infeasible", None, None, {}, {}, evaluated)
    movement = sum((best_parts[k][1] for k in agents), Fraction(0))
    completion = {k: best_parts[k][2] for k in agents}
    routes = {k: best_parts[k][3] for k in agents}
    return OracleResult("optimal", best_total, movement, completion,
                        routes, evaluated)
