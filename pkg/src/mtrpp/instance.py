"""Problem data model: a directed multigraph with timed arc outages and agents.

Times are decimal minutes held as exact rationals (fractions.Fraction), so
route costs and schedules computed from an instance are exact.  Instances are
treated as immutable after construction; all solvers share them freely.

An arc may carry explicit unavailability windows, a periodic outage rule
(offset, period, duration), or both.  Periodic rules are never materialized
eagerly; windows_until() expands them on demand up to a caller-chosen horizon.
"""

from __future__ import annotations

import heapq
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction


class InstanceError(ValueError):
    """Raised for malformed instance data (schema or structural problems)."""


def parse_minutes(value) -> Fraction:
    """Convert a JSON number or string to an exact Fraction of minutes.

    Floats are interpreted by their shortest decimal representation, so the
    JSON literal 4.1 becomes exactly 41/10.  Strings may be decimal ("4.1")
    or explicit ratios ("41/10").
    """
    if isinstance(value, bool):
        raise InstanceError(f"time value must be a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"bad time value {value!r}") from exc
    if isinstance(value, Fraction):
        return value
    raise InstanceError(f"time value must be a number, got {value!r}")


def minutes_to_json(value: Fraction):
    """Render a Fraction as int or float when lossless, else as 'p/q'."""
    if value.denominator == 1:
        return int(value)
    f = float(value)
    if Fraction(str(f)) == value:
        return f
    return str(value)


@dataclass(frozen=True)
class Window:
    """A single unavailability interval (lower, upper), open on the inside."""
    lower: Fraction
    upper: Fraction


@dataclass(frozen=True)
class PeriodicRule:
    """Periodic outage: blocked on [offset + i*period, offset + i*period + duration)."""
    offset: Fraction
    period: Fraction
    duration: Fraction


@dataclass
class Arc:
    id: str
    tail: str
    head: str
    windows: tuple[Window, ...] = ()
    periodic: PeriodicRule | None = None


@dataclass
class Agent:
    id: str
    depots: tuple[str, ...]
    exits: tuple[str, ...]


@dataclass
class Instance:
    """An immutable routing problem over a directed multigraph.

    running_times maps (agent_id, arc_id) to minutes and must cover every
    pair.  service_ids lists the arcs that must be traversed exactly once by
    some agent; all remaining arcs form the deadhead graph.
    """
    vertices: tuple[str, ...]
    arcs: tuple[Arc, ...]
    service_ids: tuple[str, ...]
    agents: tuple[Agent, ...]
    running_times: dict[tuple[str, str], Fraction]
    beta: Fraction = Fraction(1)
    period: Fraction | None = None
    _arc_index: dict[str, Arc] = field(default_factory=dict, repr=False, compare=False)
    _service_set: frozenset[str] = field(default_factory=frozenset, repr=False, compare=False)

    def __post_init__(self):
        self._arc_index = {a.id: a for a in self.arcs}
        self._service_set = frozenset(self.service_ids)
        _check_schema(self)

    def arc(self, arc_id: str) -> Arc:
        return self._arc_index[arc_id]

    def is_service(self, arc_id: str) -> bool:
        return arc_id in self._service_set

    def deadhead_arcs(self) -> list[Arc]:
        return [a for a in self.arcs if a.id not in self._service_set]

    def service_arcs(self) -> list[Arc]:
        order = {a.id: a for a in self.arcs}
        return [order[s] for s in self.service_ids]

    def running_time(self, agent_id: str, arc_id: str) -> Fraction:
        return self.running_times[(agent_id, arc_id)]

    def max_running_time(self, arc_id: str) -> Fraction:
        return max(self.running_times[(k.id, arc_id)] for k in self.agents)


def _check_schema(inst: Instance) -> None:
    if not inst.vertices:
        raise InstanceError("instance has no vertices")
    vset = set(inst.vertices)
    if len(vset) != len(inst.vertices):
        raise InstanceError("duplicate vertex ids")
    seen = set()
    for a in inst.arcs:
        if ":" in a.id:
            raise InstanceError(f"arc id {a.id!r} must not contain ':'")
        if a.id in seen:
            raise InstanceError(f"duplicate arc id {a.id!r}")
        seen.add(a.id)
        if a.tail not in vset or a.head not in vset:
            raise InstanceError(f"arc {a.id!r} references unknown vertex")
        lows = [w.lower for w in a.windows]
        if lows != sorted(lows):
            raise InstanceError(f"arc {a.id!r} windows must be sorted by lower limit")
        prev_hi = None
        for w in a.windows:
            if not (0 <= w.lower < w.upper):
                raise InstanceError(f"arc {a.id!r} has a bad window ({w.lower}, {w.upper})")
            if prev_hi is not None and w.lower < prev_hi:
                raise InstanceError(f"arc {a.id!r} has overlapping windows")
            prev_hi = w.upper
        if a.periodic is not None:
            p = a.periodic
            if p.offset < 0 or p.period <= 0 or not (0 < p.duration < p.period):
                raise InstanceError(f"arc {a.id!r} has a bad periodic rule")
    arc_ids = {a.id for a in inst.arcs}
    sset = set(inst.service_ids)
    if len(sset) != len(inst.service_ids):
        raise InstanceError("duplicate service arc ids")
    for s in inst.service_ids:
        if s not in arc_ids:
            raise InstanceError(f"service arc {s!r} is not a declared arc")
    if not inst.agents:
        raise InstanceError("instance has no agents")
    kseen = set()
    for k in inst.agents:
        if ":" in k.id:
            raise InstanceError(f"agent id {k.id!r} must not contain ':'")
        if k.id in kseen:
            raise InstanceError(f"duplicate agent id {k.id!r}")
        kseen.add(k.id)
        if not k.depots or not k.exits:
            raise InstanceError(f"agent {k.id!r} needs nonempty depot and exit sets")
        for v in itertools.chain(k.depots, k.exits):
            if v not in vset:
                raise InstanceError(f"agent {k.id!r} references unknown vertex {v!r}")
    for k in inst.agents:
        for a in inst.arcs:
            w = inst.running_times.get((k.id, a.id))
            if w is None:
                raise InstanceError(f"missing running time for {k.id}:{a.id}")
            if w <= 0:
                raise InstanceError(f"running time for {k.id}:{a.id} must be positive")
    if inst.beta < 0:
        raise InstanceError("beta must be nonnegative")
    if inst.period is not None and inst.period <= 0:
        raise InstanceError("period must be positive")


# ---------------------------------------------------------------------------
# window expansion

def iter_windows(arc: Arc):
    """Yield the arc's outage windows in chronological order, unbounded."""
    explicit = iter(arc.windows)
    if arc.periodic is None:
        yield from explicit
        return
    p = arc.periodic

    def periodic_stream():
        for i in itertools.count():
            lo = p.offset + i * p.period
            yield Window(lo, lo + p.duration)

    yield from heapq.merge(explicit, periodic_stream(), key=lambda w: w.lower)


def windows_until(arc: Arc, horizon: Fraction) -> list[Window]:
    """All windows whose lower limit is strictly below horizon, in order."""
    out = []
    for w in iter_windows(arc):
        if w.lower >= horizon:
            break
        out.append(w)
    return out


_SCAN_GUARD = 100_000


def is_departure_feasible(arc: Arc, running_time: Fraction, t: Fraction) -> bool:
    """True iff leaving the arc's tail at time t keeps the crossing clear of
    every outage.  The crossing occupies [t, t + running_time]; it conflicts
    with an outage (lo, hi) exactly when lo - running_time < t < hi, so
    touching an outage boundary is allowed."""
    for w in iter_windows(arc):
        if w.lower - running_time >= t:
            return True
        if t < w.upper:
            return False
    return True


def earliest_departure(arc: Arc, running_time: Fraction, arrival: Fraction) -> Fraction:
    """Earliest feasible departure from the arc's tail at or after arrival.

    Single forward scan over outages ordered by lower limit: the departure
    only moves later, and once it is at or before lo - running_time no
    remaining outage can interfere.  Raises InstanceError when the scan fails
    to settle, which happens only when repeating outages leave gaps shorter
    than the running time (an ill-defined arc).
    """
    y = arrival
    for i, w in enumerate(iter_windows(arc)):
        if y <= w.lower - running_time:
            return y
        if y < w.upper:
            y = w.upper
        if i >= _SCAN_GUARD:
            raise InstanceError(
                f"arc {arc.id!r} never becomes available for a crossing of "
                f"length {running_time} after {arrival}")
    return y


# ---------------------------------------------------------------------------
# data compatibility checks

@dataclass(frozen=True)
class Violation:
    code: str      # "self-loop" | "availability" | "gap" | "connectivity"
    subject: str   # arc id or graph description
    detail: str

    def __str__(self):
        return f"[{self.code}] {self.subject}: {self.detail}"


def _deadhead_adjacency(inst: Instance, reverse: bool = False) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in inst.vertices}
    for a in inst.deadhead_arcs():
        if reverse:
            adj[a.head].add(a.tail)
        else:
            adj[a.tail].add(a.head)
    return adj


def _reachable(adj: dict[str, set[str]], start: str) -> set[str]:
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                q.append(v)
    return seen


def is_strongly_connected(inst: Instance) -> bool:
    """Strong connectivity of the deadhead graph (service arcs excluded)."""
    start = inst.vertices[0]
    fwd = _reachable(_deadhead_adjacency(inst), start)
    bwd = _reachable(_deadhead_adjacency(inst, reverse=True), start)
    return len(fwd) == len(inst.vertices) and len(bwd) == len(inst.vertices)


def deadhead_diameter(inst: Instance) -> int:
    """Max over ordered vertex pairs of the minimum-hop deadhead path length."""
    adj = _deadhead_adjacency(inst)
    best = 0
    for s in inst.vertices:
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        if len(dist) < len(inst.vertices):
            raise InstanceError("deadhead graph is not strongly connected")
        best = max(best, max(dist.values()))
    return best


def inspection_time_bound(inst: Instance, tp: Fraction) -> Fraction:
    """Completion-time bound tp * (number of service arcs + 1) * hop diameter."""
    tp = parse_minutes(tp)
    if tp <= 0:
        raise ValueError("tp must be positive")
    return tp * (len(inst.service_ids) + 1) * deadhead_diameter(inst)


def _check_horizon(inst: Instance) -> Fraction:
    """Horizon for outage-structure checks: the inspection bound when a
    period is declared, else last explicit outage plus the slowest traversal."""
    if inst.period is not None and is_strongly_connected(inst):
        return inspection_time_bound(inst, inst.period)
    uppers = [w.upper for a in inst.arcs for w in a.windows]
    rmax = max(inst.running_times.values())
    return (max(uppers) if uppers else Fraction(0)) + rmax + 1


def validate_well_defined(inst: Instance) -> list[Violation]:
    """Check that every arc stays traversable and the deadhead graph is
    strongly connected.  Returns a list of violations; empty means valid."""
    out: list[Violation] = []
    for a in inst.arcs:
        if a.tail == a.head:
            out.append(Violation("self-loop", a.id, f"arc loops at vertex {a.tail!r}"))
    horizon = _check_horizon(inst)
    for a in inst.arcs:
        wmax = inst.max_running_time(a.id)
        expand_to = horizon
        if a.periodic is not None:
            expand_to = horizon + 2 * a.periodic.period
        wins = windows_until(a, expand_to)
        # free intervals: before the first window, between windows, and after
        # the last one (unbounded unless the outages repeat forever)
        free = []
        cursor = Fraction(0)
        for w in wins:
            if w.lower > cursor:
                free.append((cursor, w.lower))
            cursor = max(cursor, w.upper)
        if a.periodic is None:
            free.append((cursor, None))
        gap_violation_logged = False
        for prev, nxt in zip(wins, wins[1:]):
            gap = nxt.lower - prev.upper
            if gap < wmax and not gap_violation_logged:
                out.append(Violation(
                    "gap", a.id,
                    f"availability gap {gap} between outages ending {prev.upper} "
                    f"and starting {nxt.lower} is smaller than running time {wmax}"))
                gap_violation_logged = True
        usable = any(hi is None or (lo < horizon and hi - lo >= wmax)
                     for (lo, hi) in free)
        if not usable:
            out.append(Violation(
                "availability", a.id,
                f"no availability interval of length {wmax} within horizon {horizon}"))
    if not is_strongly_connected(inst):
        out.append(Violation("connectivity", "deadhead graph",
                             "deadhead graph is not strongly connected"))
    return out


def check_periodic_connectivity(inst: Instance, tp: Fraction) -> bool:
    """True iff every deadhead arc offers, inside every interval
    [j*tp, (j+1)*tp] up to the inspection bound, a free stretch at least as
    long as that arc's slowest traversal."""
    tp = parse_minutes(tp)
    if tp <= 0:
        raise ValueError("tp must be positive")
    if not is_strongly_connected(inst):
        return False
    bound = inspection_time_bound(inst, tp)
    n_intervals = int(bound / tp) + (0 if bound % tp == 0 else 1)
    for a in inst.deadhead_arcs():
        wmax = inst.max_running_time(a.id)
        wins = windows_until(a, bound + tp)
        for j in range(n_intervals):
            t0, t1 = j * tp, (j + 1) * tp
            cursor = t0
            best = Fraction(0)
            for w in wins:
                if w.upper <= t0:
                    continue
                if w.lower >= t1:
                    break
                lo = max(w.lower, t0)
                if lo > cursor:
                    best = max(best, lo - cursor)
                cursor = max(cursor, min(w.upper, t1))
            best = max(best, t1 - cursor)
            if best < wmax:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON serialization

def instance_to_dict(inst: Instance) -> dict:
    arcs = []
    for a in inst.arcs:
        entry = {
            "id": a.id, "tail": a.tail, "head": a.head,
            "unavailabilities": [[minutes_to_json(w.lower), minutes_to_json(w.upper)]
                                 for w in a.windows],
        }
        if a.periodic is not None:
            entry["periodic_unavailability"] = {
                "offset": minutes_to_json(a.periodic.offset),
                "period": minutes_to_json(a.periodic.period),
                "duration": minutes_to_json(a.periodic.duration),
            }
        arcs.append(entry)
    doc = {
        "vertices": list(inst.vertices),
        "arcs": arcs,
        "service_arcs": list(inst.service_ids),
        "agents": [{"id": k.id, "depots": list(k.depots), "exits": list(k.exits)}
                   for k in inst.agents],
        "running_times": {f"{k}:{a}": minutes_to_json(w)
                          for (k, a), w in sorted(inst.running_times.items())},
        "beta": minutes_to_json(inst.beta),
    }
    if inst.period is not None:
        doc["period"] = minutes_to_json(inst.period)
    return doc


def instance_from_dict(doc: dict) -> Instance:
    try:
        arcs = []
        for entry in doc["arcs"]:
            windows = tuple(Window(parse_minutes(lo), parse_minutes(hi))
                            for lo, hi in entry.get("unavailabilities", []))
            periodic = None
            rule = entry.get("periodic_unavailability")
            if rule is not None:
                periodic = PeriodicRule(parse_minutes(rule["offset"]),
                                        parse_minutes(rule["period"]),
                                        parse_minutes(rule["duration"]))
            arcs.append(Arc(str(entry["id"]), str(entry["tail"]), str(entry["head"]),
                            windows, periodic))
        agents = tuple(Agent(str(k["id"]), tuple(k["depots"]), tuple(k["exits"]))
                       for k in doc["agents"])
        running = {}
        for key, val in doc["running_times"].items():
            agent_id, _, arc_id = key.partition(":")
            if not arc_id:
                raise InstanceError(f"running_times key {key!r} must be 'agent:arc'")
            running[(agent_id, arc_id)] = parse_minutes(val)
        return Instance(
            vertices=tuple(str(v) for v in doc["vertices"]),
            arcs=tuple(arcs),
            service_ids=tuple(str(s) for s in doc["service_arcs"]),
            agents=agents,
            running_times=running,
            beta=parse_minutes(doc.get("beta", 1)),
            period=parse_minutes(doc["period"]) if "period" in doc else None,
        )
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise InstanceError(f"malformed instance document: {exc}") from exc


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    return instance_from_dict(doc)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")
