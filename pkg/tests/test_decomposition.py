"""Tests for the lazy-cut decomposition solver."""

from fractions import Fraction as F

import pytest

from conftest import gen_tiny
from mtrpp.benders import (
    homogeneity_classes,
    relative_gap,
    simplify_walk,
    solve_mtrpp,
)
from mtrpp.generate import gen_ex1, gen_t1
from mtrpp.instance import Agent, Arc, Instance, Window
from mtrpp.monolithic import check_schedule
from mtrpp.oracle import oracle_solve


# ---------------------------------------------------------------------------
# frozen optima

def test_outage_free_instance_converges_in_one_iteration():
    res = solve_mtrpp(gen_t1())
    assert res.is_optimal
    assert res.objective == F(10)
    assert res.iteration_count == 1
    assert res.n_waiting_cuts == 0
    assert res.final_gap <= 1e-9


def test_waiting_instance_needs_a_waiting_cut():
    res = solve_mtrpp(gen_t1(blocked=True))
    assert res.objective == F(15)
    assert res.n_waiting_cuts >= 1
    assert res.iteration_count >= 2
    # the inspection run is pushed to the outage end
    assert res.routes["k1"][0] == ("s12", F(5), F(8))


def test_case_a_exact_route():
    res = solve_mtrpp(gen_ex1("a"))
    assert res.objective == F(14)
    assert res.movement == F(7)
    assert res.completion["k1"] == F(7)
    order = [a for a, _, _ in res.routes["k1"] if a in ("a2", "a5")]
    assert order == ["a2", "a5"]


def test_case_b_exact_route():
    res = solve_mtrpp(gen_ex1("b"))
    assert res.objective == F(20)
    order = [a for a, _, _ in res.routes["k1"] if a in ("a2", "a5")]
    assert order == ["a5", "a2"]


def test_case_c_splits_work_between_agents():
    res = solve_mtrpp(gen_ex1("c"))
    assert res.objective == F(109, 5)
    assert res.completion == {"k1": F(59, 10), "k2": F(59, 10)}
    assert all(res.routes[k] for k in ("k1", "k2"))


# ---------------------------------------------------------------------------
# solver mechanics

def test_bounds_are_monotone_and_bracket_the_optimum():
    res = solve_mtrpp(gen_ex1("c"))
    lowers = [r.lower_bound for r in res.iterations]
    assert lowers == sorted(lowers)
    uppers = [r.upper_bound for r in res.iterations]
    assert all(u2 <= u1 + 1e-9 for u1, u2 in zip(uppers, uppers[1:]))
    assert res.initial_gap >= res.final_gap >= 0


def test_iteration_callback_sees_every_record():
    seen = []
    res = solve_mtrpp(gen_ex1("b"), on_iteration=seen.append)
    assert [r.index for r in seen] == [r.index for r in res.iterations]


def test_iteration_limit_reported_honestly():
    res = solve_mtrpp(gen_ex1("b"), max_iterations=1)
    assert res.status == "iteration_limit"
    assert res.objective is not None          # a feasible schedule was found
    assert res.final_gap > 0


def test_schedules_are_always_valid():
    for case in "abc":
        inst = gen_ex1(case)
        res = solve_mtrpp(inst)
        assert check_schedule(inst, res.routes) == []


def test_infeasible_when_service_unreachable():
    inst = Instance(
        vertices=("v1", "v2", "v3"),
        arcs=(Arc("d12", "v1", "v2"), Arc("d21", "v2", "v1"),
              Arc("s3", "v3", "v2")),
        service_ids=("s3",),
        agents=(Agent("k1", ("v1",), ("v1",)),),
        running_times={("k1", "d12"): F(1), ("k1", "d21"): F(1),
                       ("k1", "s3"): F(1)},
    )
    assert solve_mtrpp(inst).status == "infeasible"


def test_heterogeneous_running_times_direct_the_split():
    # two agents; k2 crosses everything at a tenth of k1's pace
    base = gen_ex1("c")
    running = {}
    for (k, a), w in base.running_times.items():
        running[(k, a)] = w * 10 if k == "k1" else w
    inst = Instance(vertices=base.vertices, arcs=base.arcs,
                    service_ids=base.service_ids, agents=base.agents,
                    running_times=running)
    res = solve_mtrpp(inst)
    ora = oracle_solve(inst)
    assert res.objective == ora.objective
    assert res.routes["k1"] == []             # the slow agent stays home


def test_matches_oracle_on_seeded_instances():
    for seed in range(25):
        inst = gen_tiny(seed)
        res = solve_mtrpp(inst)
        ora = oracle_solve(inst)
        if ora.status == "infeasible":
            assert res.status == "infeasible"
        else:
            assert res.is_optimal
            assert res.objective == ora.objective, f"seed {seed}"
            assert check_schedule(inst, res.routes) == []


# ---------------------------------------------------------------------------
# helpers

def test_relative_gap_uses_unit_floor():
    assert relative_gap(0.5, 0.25) == 0.25
    assert relative_gap(200.0, 100.0) == 0.5
    assert relative_gap(None, 3.0) is None


def test_simplify_walk_drops_loops():
    class Col:
        def __init__(self, tail, head):
            self.tail, self.head = tail, head

        def __repr__(self):
            return f"{self.tail}->{self.head}"

    a, b = Col(0, 1), Col(1, 2)
    loop1, loop2 = Col(2, 3), Col(3, 2)
    tail = Col(2, 4)
    out = simplify_walk([a, b, loop1, loop2, tail])
    assert [(c.tail, c.head) for c in out] == [(0, 1), (1, 2), (2, 4)]
    assert simplify_walk([]) == []


def test_homogeneity_classes_require_full_match():
    c = gen_ex1("c")
    classes = homogeneity_classes(c)
    assert classes["k1"] == ["k1", "k2"]
    hetero = Instance(
        vertices=c.vertices, arcs=c.arcs, service_ids=c.service_ids,
        agents=c.agents,
        running_times={(k, a): (w + 1 if k == "k2" and a == "a1" else w)
                       for (k, a), w in c.running_times.items()},
    )
    classes = homogeneity_classes(hetero)
    assert classes["k1"] == ["k1"]
    assert classes["k2"] == ["k2"]
