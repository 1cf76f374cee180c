"""Shared helpers: seeded small random instances for cross-solver checks."""

import random
from fractions import Fraction as F

from mtrpp.instance import Agent, Arc, Instance, Window


def gen_tiny(seed: int, exits_cover_depots: bool = False) -> Instance:
    """Small seeded instance with integer data and scattered outages.

    Keeps outage gaps at least as long as the slowest running time, so every
    instance is structurally sound.  With exits_cover_depots each agent's
    depot doubles as an exit, which lets an idle agent stay home in models
    that make every agent travel to an exit.
    """
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    verts = tuple(f"v{i}" for i in range(n))
    arcs = [Arc(f"c{i}", verts[i], verts[(i + 1) % n]) for i in range(n)]
    for j in range(rng.randint(0, 3)):
        t, h = rng.sample(range(n), 2)
        arcs.append(Arc(f"x{j}", verts[t], verts[h]))
    service = []
    for i, parent in enumerate(rng.sample(arcs, rng.randint(1, 2))):
        sid = f"s{i}"
        arcs.append(Arc(sid, parent.tail, parent.head))
        service.append(sid)
    agents = []
    for i in range(rng.randint(1, 2)):
        depot = rng.choice(verts)
        exit_v = depot if exits_cover_depots else rng.choice(verts)
        agents.append(Agent(f"k{i}", (depot,), (exit_v,)))
    running = {(k.id, a.id): F(rng.randint(1, 5)) for k in agents for a in arcs}
    wmax = 5
    timed = []
    for a in arcs:
        wins = []
        if rng.random() < 0.6:
            t0 = rng.randint(0, 10)
            for _ in range(rng.randint(1, 2)):
                lo = t0 + rng.randint(0, 4)
                hi = lo + rng.randint(1, 6)
                wins.append(Window(F(lo), F(hi)))
                t0 = hi + wmax + rng.randint(0, 3)
        timed.append(Arc(a.id, a.tail, a.head, tuple(wins)))
    return Instance(vertices=verts, arcs=tuple(timed),
                    service_ids=tuple(service), agents=tuple(agents),
                    running_times=running)
