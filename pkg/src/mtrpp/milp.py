"""Small deterministic mixed-integer linear solver.

Models are built column by column and row by row, then solved by best-first
branch and bound on the fractional variables.  Linear relaxations are handed
to scipy's HiGHS backend; everything above the relaxation (node order,
branching, pruning, bound bookkeeping) lives here so runs are reproducible:
node selection breaks ties by creation order and branching picks the most
fractional variable, lowest index first.

Minimization only.  Statuses: "optimal", "infeasible", "unbounded",
"time_limit" (incumbent and bound still reported when the clock runs out).
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

INT_TOL = 1e-6
PRUNE_TOL = 1e-9


@dataclass
class _Row:
    coeffs: dict[int, float]
    sense: str
    rhs: float


@dataclass
class MilpSolution:
    status: str
    objective: float | None
    x: np.ndarray | None
    best_bound: float
    node_count: int
    runtime: float

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class MilpModel:
    names: list[str] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    integral: list[bool] = field(default_factory=list)
    rows: list[_Row] = field(default_factory=list)

    # -- building ------------------------------------------------------------

    def add_column(self, name: str, objective: float = 0.0,
                   lower: float = 0.0, upper: float | None = None,
                   integral: bool = False) -> int:
        self.names.append(name)
        self.objective.append(float(objective))
        self.lower.append(float(lower))
        self.upper.append(math.inf if upper is None else float(upper))
        self.integral.append(integral)
        return len(self.names) - 1

    def add_binary(self, name: str, objective: float = 0.0) -> int:
        return self.add_column(name, objective, 0.0, 1.0, integral=True)

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown row sense {sense!r}")
        self.rows.append(_Row({j: float(v) for j, v in coeffs.items() if v != 0.0},
                              sense, float(rhs)))
        return len(self.rows) - 1

    def set_objective_coeff(self, index: int, value: float) -> None:
        self.objective[index] = float(value)

    @property
    def num_columns(self) -> int:
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    # -- relaxation assembly ---------------------------------------------

    def _matrices(self):
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for row in self.rows:
            if row.sense == "==":
                eq_rows.append(row.coeffs)
                eq_rhs.append(row.rhs)
            elif row.sense == "<=":
                ub_rows.append(row.coeffs)
                ub_rhs.append(row.rhs)
            else:
                ub_rows.append({j: -v for j, v in row.coeffs.items()})
                ub_rhs.append(-row.rhs)

        def build(rows):
            if not rows:
                return None
            data, ri, ci = [], [], []
            for i, coeffs in enumerate(rows):
                for j, v in coeffs.items():
                    ri.append(i)
                    ci.append(j)
                    data.append(v)
            return sparse.csr_matrix((data, (ri, ci)),
                                     shape=(len(rows), self.num_columns))

        return (build(ub_rows), np.array(ub_rhs) if ub_rhs else None,
                build(eq_rows), np.array(eq_rhs) if eq_rhs else None)

    def solve_relaxation(self, lower=None, upper=None):
        """LP relaxation under optional replacement bounds.

        Returns (status, objective, x) with status in
        "optimal" | "infeasible" | "unbounded".
        """
        a_ub, b_ub, a_eq, b_eq = self._matrices()
        lo = np.asarray(self.lower if lower is None else lower, dtype=float)
        hi = np.asarray(self.upper if upper is None else upper, dtype=float)
        if (lo > hi).any():
            return "infeasible", None, None
        res = linprog(np.asarray(self.objective, dtype=float),
                      A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=list(zip(lo, hi)), method="highs")
        if res.status == 0:
            return "optimal", float(res.fun), np.asarray(res.x)
        if res.status == 2:
            return "infeasible", None, None
        if res.status == 3:
            return "unbounded", None, None
        raise RuntimeError(f"relaxation solver failed: {res.message}")

    # -- branch and bound --------------------------------------------------

    def _most_fractional(self, x) -> int | None:
        best_j, best_dist = None, INT_TOL
        for j, is_int in enumerate(self.integral):
            if not is_int:
                continue
            dist = abs(x[j] - round(x[j]))
            if dist > best_dist + 1e-15:
                best_j, best_dist = j, dist
        return best_j

    def solve(self, time_limit: float | None = None) -> MilpSolution:
        start = time.monotonic()
        incumbent_obj = math.inf
        incumbent_x = None
        node_count = 0
        counter = 0
        heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []

        status, obj, x = self.solve_relaxation()
        node_count += 1
        if status == "infeasible":
            return MilpSolution("infeasible", None, None, math.inf,
                                node_count, time.monotonic() - start)
        if status == "unbounded":
            return MilpSolution("unbounded", None, None, -math.inf,
                                node_count, time.monotonic() - start)
        heapq.heappush(heap, (obj, counter,
                              np.asarray(self.lower, dtype=float),
                              np.asarray(self.upper, dtype=float)))

        while heap:
            bound, _, lo, hi = heapq.heappop(heap)
            if bound >= incumbent_obj - PRUNE_TOL:
                break  # best-first: every remaining node is at least as bad
            if time_limit is not None and time.monotonic() - start > time_limit:
                best_bound = bound
                return MilpSolution("time_limit",
                                    None if incumbent_x is None else incumbent_obj,
                                    incumbent_x, best_bound, node_count,
                                    time.monotonic() - start)
            # re-solve at the node's bounds (the root is solved twice, which
            # is cheap and keeps the node records to just two bound arrays)
            status, obj, x = self.solve_relaxation(lo, hi)
            node_count += 1
            if status != "optimal" or obj >= incumbent_obj - PRUNE_TOL:
                continue
            j = self._most_fractional(x)
            if j is None:
                rounded = x.copy()
                for i, is_int in enumerate(self.integral):
                    if is_int:
                        rounded[i] = round(x[i])
                if obj < incumbent_obj - PRUNE_TOL:
                    incumbent_obj, incumbent_x = obj, rounded
                continue
            counter += 1
            down_hi = hi.copy()
            down_hi[j] = math.floor(x[j])
            heapq.heappush(heap, (obj, counter, lo, down_hi))
            counter += 1
            up_lo = lo.copy()
            up_lo[j] = math.ceil(x[j])
            heapq.heappush(heap, (obj, counter, up_lo, hi))

        runtime = time.monotonic() - start
        if incumbent_x is None:
            return MilpSolution("infeasible", None, None, math.inf,
                                node_count, runtime)
        return MilpSolution("optimal", incumbent_obj, incumbent_x,
                            incumbent_obj, node_count, runtime)

    # -- export --------------------------------------------------------------

    def write_lp(self, path) -> None:
        """Write the model in LP text format for outside inspection."""
        def term(j, v):
            sign = "+" if v >= 0 else "-"
            return f"{sign} {abs(v):g} {self.names[j]}"

        lines = ["Minimize", " obj: " + " ".join(
            term(j, v) for j, v in enumerate(self.objective) if v != 0.0)]
        lines.append("Subject To")
        for i, row in enumerate(self.rows):
            sense = {"<=": "<=", ">=": ">=", "==": "="}[row.sense]
            body = " ".join(term(j, v) for j, v in sorted(row.coeffs.items()))
            lines.append(f" r{i}: {body} {sense} {row.rhs:g}")
        lines.append("Bounds")
        for j in range(self.num_columns):
            lo, hi = self.lower[j], self.upper[j]
            hi_txt = "+inf" if math.isinf(hi) else f"{hi:g}"
            lines.append(f" {lo:g} <= {self.names[j]} <= {hi_txt}")
        ints = [self.names[j] for j in range(self.num_columns) if self.integral[j]]
        if ints:
            lines.append("General")
            lines.append(" " + " ".join(ints))
        lines.append("End")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
