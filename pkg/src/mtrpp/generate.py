"""Instance builders: worked examples, a synthetic periodic network, and
seeded random instances.

The three worked cases (a, b, c) share one small track layout — two parallel
corridors between three junctions with two inspection arcs — and differ only
in outage windows, fleet size, and planning horizon.  They are sized so that
every solver route, including the brute-force one, finishes instantly, while
still exercising outage waiting, service reordering, and fleet splitting.

The synthetic periodic network is a 36-vertex directed ring with 9 long
forward chords and 9 inspection arcs, giving a deadhead hop diameter of
exactly 21, with seeded repeating outages on every ring arc and a 74-minute
system period.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .instance import Agent, Arc, Instance, PeriodicRule, Window

#: planning horizons used when the worked examples are solved on a time grid
EX1_HORIZONS = {"a": Fraction(8), "b": Fraction(20), "c": Fraction(12)}

_EX1_RUNNING = {
    "a1": Fraction(2), "a2": Fraction(4), "a3": Fraction(1),
    "a4": Fraction(1), "a5": Fraction(1), "a6": Fraction(6),
}

_EX1_WINDOWS = {
    "a": {"a1": [(4, 5)], "a2": [(4, 5)], "a5": [(7, 8)], "a6": [(7, 8)]},
    "b": {"a4": [(4, 5)], "a5": [(5, 14)]},
    "c": {"a3": [("4.1", "4.9"), ("8.1", "10.9")],
          "a4": [("4.1", "4.9")],
          "a5": [("5.5", "14")]},
}


def gen_ex1(case: str) -> Instance:
    """Worked example on three junctions; case "a", "b", or "c".

    Layout: a1 (move v1->v2), a2 (inspect v1->v2), a3 (move v2->v1),
    a4 (move v2->v3), a5 (inspect v3->v2), a6 (move v3->v2).  Cases "a" and
    "b" run one agent from/to v1; case "c" runs two identical agents.
    """
    if case not in _EX1_WINDOWS:
        raise ValueError(f"unknown case {case!r}; expected one of: a, b, c")
    windows = _EX1_WINDOWS[case]

    def win(arc_id):
        return tuple(Window(Fraction(str(lo)), Fraction(str(hi)))
                     for lo, hi in windows.get(arc_id, []))

    arcs = (
        Arc("a1", "v1", "v2", win("a1")),
        Arc("a2", "v1", "v2", win("a2")),
        Arc("a3", "v2", "v1", win("a3")),
        Arc("a4", "v2", "v3", win("a4")),
        Arc("a5", "v3", "v2", win("a5")),
        Arc("a6", "v3", "v2", win("a6")),
    )
    n_agents = 2 if case == "c" else 1
    agents = tuple(Agent(f"k{i + 1}", ("v1",), ("v1",)) for i in range(n_agents))
    running = {(k.id, a): w for k in agents for a, w in _EX1_RUNNING.items()}
    return Instance(
        vertices=("v1", "v2", "v3"),
        arcs=arcs,
        service_ids=("a2", "a5"),
        agents=agents,
        running_times=running,
    )


def gen_t1(blocked: bool = False) -> Instance:
    """Two-vertex warm-up: one inspection arc and a return track.

    Without outages the only sensible plan costs 10 (inspect at once, ride
    back).  With `blocked` the inspection departure is pushed to minute 5,
    which costs 5 minutes of waiting and raises the optimum to 15.
    """
    wins = (Window(Fraction(2), Fraction(5)),) if blocked else ()
    arcs = (
        Arc("d12", "v1", "v2"),
        Arc("s12", "v1", "v2", wins),
        Arc("d21", "v2", "v1"),
    )
    agents = (Agent("k1", ("v1",), ("v1",)),)
    running = {("k1", "d12"): Fraction(2), ("k1", "s12"): Fraction(3),
               ("k1", "d21"): Fraction(2)}
    return Instance(vertices=("v1", "v2"), arcs=arcs, service_ids=("s12",),
                    agents=agents, running_times=running)


def gen_ex2_synthetic(seed: int = 0, n_agents: int = 2) -> Instance:
    """Ring-and-chord periodic network: 36 stations, 45 movement tracks,
    9 inspection arcs, hop diameter 21, system period 74.

    Every ring track and every inspection arc repeats a seeded outage each
    period.  Outage lengths stay at most 74 minus twice the slowest running
    time, so a long-enough free stretch survives in every period window no
    matter how the outage straddles it.
    """
    rng = random.Random(seed)
    period = Fraction(74)
    n = 36
    vertices = tuple(f"s{i:02d}" for i in range(n))

    running_of: dict[str, Fraction] = {}
    arcs: list[Arc] = []

    def ring_id(i):
        return f"r{i:02d}"

    for i in range(n):
        w = Fraction(rng.randint(1, 10))
        running_of[ring_id(i)] = w
        arcs.append(Arc(ring_id(i), vertices[i], vertices[(i + 1) % n]))
    for j in range(9):
        w = Fraction(rng.randint(1, 10))
        running_of[f"c{j}"] = w
        tail = 4 * j
        head = (4 * j + 19) % n
        arcs.append(Arc(f"c{j}", vertices[tail], vertices[head]))
    service_ids = []
    for j in range(9):
        w = Fraction(rng.randint(1, 10))
        sid = f"p{j}"
        running_of[sid] = w
        tail = 4 * j
        arcs.append(Arc(sid, vertices[tail], vertices[(tail + 1) % n]))
        service_ids.append(sid)

    w_max = max(running_of.values())
    max_duration = int(period - 2 * w_max)
    outage_arcs = [ring_id(i) for i in range(n)] + service_ids
    arc_by_id = {a.id: a for a in arcs}
    for arc_id in outage_arcs:
        offset = Fraction(rng.randint(0, 73))
        duration = Fraction(min(rng.randint(1, 10), max_duration))
        old = arc_by_id[arc_id]
        arc_by_id[arc_id] = Arc(old.id, old.tail, old.head, (),
                                PeriodicRule(offset, period, duration))
    arcs = [arc_by_id[a.id] for a in arcs]

    agents = tuple(Agent(f"a{i + 1}", ("s00",), ("s00",)) for i in range(n_agents))
    running = {(k.id, a): w for k in agents for a, w in running_of.items()}
    return Instance(vertices=vertices, arcs=tuple(arcs),
                    service_ids=tuple(service_ids), agents=agents,
                    running_times=running, period=period)


def gen_random_tdrpp(seed: int, n_vertices: int = 20,
                     arc_factor: float = 1.2,
                     service_frac: float = 0.3) -> Instance:
    """Seeded random instance around a random closed tour.

    A Hamiltonian tour over shuffled vertices guarantees strong connectivity;
    extra movement arcs are sprinkled on top until the arc count reaches
    round(arc_factor * n_vertices).  A service_frac share of the movement
    arcs get a parallel inspection arc with its own running time.  Tour arcs
    repeat a seeded outage every 60 minutes.  One agent starts and ends at
    the tour's first vertex.
    """
    if n_vertices < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    period = Fraction(60)
    vertices = tuple(f"v{i}" for i in range(n_vertices))
    order = list(vertices)
    rng.shuffle(order)

    arcs: list[Arc] = []
    running_of: dict[str, Fraction] = {}
    for i in range(n_vertices):
        aid = f"t{i}"
        tail, head = order[i], order[(i + 1) % n_vertices]
        offset = Fraction(rng.randint(0, 59))
        duration = Fraction(rng.randint(1, 10))
        arcs.append(Arc(aid, tail, head, (),
                        PeriodicRule(offset, period, duration)))
        running_of[aid] = Fraction(rng.randint(1, 10))

    n_deadheads = max(n_vertices, round(arc_factor * n_vertices))
    extra = 0
    while len(arcs) < n_deadheads:
        tail, head = rng.sample(vertices, 2)
        aid = f"x{extra}"
        extra += 1
        arcs.append(Arc(aid, tail, head))
        running_of[aid] = Fraction(rng.randint(1, 10))

    n_service = round(service_frac * len(arcs))
    service_ids = []
    for i, parent in enumerate(rng.sample(arcs, n_service)):
        sid = f"s{i}"
        arcs.append(Arc(sid, parent.tail, parent.head))
        running_of[sid] = Fraction(rng.randint(1, 10))
        service_ids.append(sid)

    agents = (Agent("k1", (order[0],), (order[0],)),)
    running = {(k.id, a): w for k in agents for a, w in running_of.items()}
    return Instance(vertices=vertices, arcs=tuple(arcs),
                    service_ids=tuple(service_ids), agents=agents,
                    running_times=running, period=period)
