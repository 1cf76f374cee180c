"""Layered per-agent route graph used by the decomposition solver.

Each agent gets its own component: one copy of the deadhead graph per layer,
with as many layers as service arcs plus one.  Crossing a service arc is the
only way to move from a layer to the next, so any source-to-sink path crosses
at most one service arc per transition and the layer index counts completed
services.  A virtual source feeds the agent's depot vertices in the first
layer, every exit vertex of every layer feeds a virtual sink, and a direct
source-to-sink shortcut lets an agent stay unused at zero cost.

Node and column order is deterministic and documented here, because solver
cuts and tests address columns by index:

* nodes:   per agent (input order): source, sink, then layers 1..L with the
           instance's vertices in input order inside each layer;
* columns: per agent: deadhead copies layer by layer (arcs in input order),
           then service copies transition by transition (service arcs in
           declaration order), then source arcs (depots in declaration
           order), then sink arcs layer by layer (exits in declaration
           order), then the source-to-sink shortcut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from .instance import Instance

SOURCE_LAYER = 0

KIND_DEADHEAD = "deadhead"
KIND_SERVICE = "service"
KIND_SOURCE = "source"
KIND_SINK = "sink"
KIND_SHORTCUT = "shortcut"

REAL_KINDS = (KIND_DEADHEAD, KIND_SERVICE)


@dataclass(frozen=True)
class Node:
    index: int
    agent_id: str
    kind: str              # "source" | "sink" | "vertex"
    vertex: str | None
    layer: int


@dataclass(frozen=True)
class Column:
    index: int
    agent_id: str
    kind: str              # one of the KIND_* constants
    arc_id: str | None     # parent arc for deadhead/service copies
    layer: int             # tail layer (source/shortcut use 0)
    tail: int              # node index
    head: int              # node index
    weight: Fraction       # running time for real copies, 0 for virtual arcs

    @property
    def is_real(self) -> bool:
        return self.kind in REAL_KINDS


class ReplicatedGraph:
    """The full multi-agent layered graph with stable node/column indexing."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.num_layers = len(instance.service_ids) + 1
        self.nodes: list[Node] = []
        self.columns: list[Column] = []
        self._node_index: dict[tuple, int] = {}
        self._build()

    # -- construction -------------------------------------------------------

    def _add_node(self, agent_id, kind, vertex, layer) -> int:
        idx = len(self.nodes)
        self.nodes.append(Node(idx, agent_id, kind, vertex, layer))
        self._node_index[(agent_id, kind, vertex, layer)] = idx
        return idx

    def _add_column(self, agent_id, kind, arc_id, layer, tail, head, weight) -> int:
        idx = len(self.columns)
        self.columns.append(Column(idx, agent_id, kind, arc_id, layer,
                                   tail, head, weight))
        return idx

    def _build(self) -> None:
        inst = self.instance
        L = self.num_layers
        deadheads = inst.deadhead_arcs()
        services = inst.service_arcs()
        for agent in inst.agents:
            k = agent.id
            self._add_node(k, "source", None, SOURCE_LAYER)
            self._add_node(k, "sink", None, SOURCE_LAYER)
            for layer in range(1, L + 1):
                for v in inst.vertices:
                    self._add_node(k, "vertex", v, layer)
            for layer in range(1, L + 1):
                for a in deadheads:
                    self._add_column(
                        k, KIND_DEADHEAD, a.id, layer,
                        self.node_id(k, a.tail, layer),
                        self.node_id(k, a.head, layer),
                        inst.running_time(k, a.id))
            for layer in range(1, L):
                for a in services:
                    self._add_column(
                        k, KIND_SERVICE, a.id, layer,
                        self.node_id(k, a.tail, layer),
                        self.node_id(k, a.head, layer + 1),
                        inst.running_time(k, a.id))
            src = self.source_id(k)
            snk = self.sink_id(k)
            for v in agent.depots:
                self._add_column(k, KIND_SOURCE, None, SOURCE_LAYER,
                                 src, self.node_id(k, v, 1), Fraction(0))
            for layer in range(1, L + 1):
                for v in agent.exits:
                    self._add_column(k, KIND_SINK, None, layer,
                                     self.node_id(k, v, layer), snk, Fraction(0))
            self._add_column(k, KIND_SHORTCUT, None, SOURCE_LAYER,
                             src, snk, Fraction(0))

    # -- lookups ------------------------------------------------------------

    def node_id(self, agent_id: str, vertex: str, layer: int) -> int:
        return self._node_index[(agent_id, "vertex", vertex, layer)]

    def source_id(self, agent_id: str) -> int:
        return self._node_index[(agent_id, "source", None, SOURCE_LAYER)]

    def sink_id(self, agent_id: str) -> int:
        return self._node_index[(agent_id, "sink", None, SOURCE_LAYER)]

    def columns_for_agent(self, agent_id: str) -> list[Column]:
        return [c for c in self.columns if c.agent_id == agent_id]

    def real_columns(self) -> list[Column]:
        return [c for c in self.columns if c.is_real]

    def column_lookup(self) -> dict[tuple, Column]:
        """Key (agent_id, kind, arc_id, layer) -> column, for cut replication."""
        return {(c.agent_id, c.kind, c.arc_id, c.layer): c for c in self.columns}

    def corresponding_column(self, col: Column, other_agent: str) -> Column:
        """The structurally identical column in another agent's component."""
        key = (other_agent, col.kind, col.arc_id, col.layer)
        return self.column_lookup()[key]

    # -- matrix views -------------------------------------------------------

    def incidence(self) -> sparse.csr_matrix:
        """Node-arc incidence: -1 at each column's tail row, +1 at its head."""
        rows, cols, vals = [], [], []
        for c in self.columns:
            rows.append(c.tail)
            cols.append(c.index)
            vals.append(-1.0)
            rows.append(c.head)
            cols.append(c.index)
            vals.append(1.0)
        return sparse.csr_matrix(
            (vals, (rows, cols)), shape=(len(self.nodes), len(self.columns)))

    def flow_rhs(self) -> np.ndarray:
        """One flow unit leaves each source and enters each sink."""
        b = np.zeros(len(self.nodes))
        for agent in self.instance.agents:
            b[self.source_id(agent.id)] = -1.0
            b[self.sink_id(agent.id)] = 1.0
        return b

    def service_requirement_rows(self) -> list[tuple[str, list[int]]]:
        """For each service arc, the column indices whose sum must equal 1."""
        members: dict[str, list[int]] = {s: [] for s in self.instance.service_ids}
        for c in self.columns:
            if c.kind == KIND_SERVICE:
                members[c.arc_id].append(c.index)
        return [(s, members[s]) for s in self.instance.service_ids]

    # -- solution decoding --------------------------------------------------

    def walk_from_source(self, agent_id: str, selected: set[int]
                         ) -> tuple[list[Column], set[int]]:
        """Trace the agent's source-to-sink walk through its selected columns.

        Returns the ordered walk and the leftover selected columns of this
        agent (members of disjoint circulations, if any).  At nodes crossed
        by both the walk and a circulation the lowest-index unused column is
        taken, which keeps decoding deterministic.
        """
        mine = sorted(i for i in selected if self.columns[i].agent_id == agent_id)
        out_by_tail: dict[int, list[int]] = {}
        for i in mine:
            out_by_tail.setdefault(self.columns[i].tail, []).append(i)
        walk: list[Column] = []
        used: set[int] = set()
        node = self.source_id(agent_id)
        sink = self.sink_id(agent_id)
        for _ in range(len(mine) + 1):
            if node == sink:
                return walk, set(mine) - used
            options = [i for i in out_by_tail.get(node, []) if i not in used]
            if not options:
                raise ValueError(
                    f"selected columns of agent {agent_id!r} do not reach the sink")
            nxt = options[0]
            used.add(nxt)
            walk.append(self.columns[nxt])
            node = self.columns[nxt].head
        raise ValueError(
            f"selected columns of agent {agent_id!r} do not form a finite walk")

    # -- export -------------------------------------------------------------

    def to_dot(self) -> str:
        """GraphViz rendering grouped by agent and layer."""
        lines = ["digraph layered {", "  rankdir=LR;"]
        for node in self.nodes:
            if node.kind == "vertex":
                label = f"{node.vertex}@{node.layer}"
            else:
                label = f"{node.kind}({node.agent_id})"
            lines.append(f'  n{node.index} [label="{label}"];')
        for c in self.columns:
            style = {
                KIND_DEADHEAD: "solid",
                KIND_SERVICE: "bold",
                KIND_SOURCE: "dashed",
                KIND_SINK: "dashed",
                KIND_SHORTCUT: "dotted",
            }[c.kind]
            label = c.arc_id if c.arc_id is not None else c.kind
            lines.append(
                f'  n{c.tail} -> n{c.head} [label="{label}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def count_real_columns(instance: Instance) -> int:
    """Closed form for the number of real (non-virtual) columns."""
    n_arcs = len(instance.arcs)
    n_service = len(instance.service_ids)
    layers = n_service + 1
    return (n_arcs * layers - n_service) * len(instance.agents)
