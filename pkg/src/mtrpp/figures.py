"""Figure rendering for solve reports.

Renders to files through the Agg backend, so it works headless.  Three
renderings are provided: the bound-convergence trace of a decomposition run,
a time-space diagram of the scheduled routes over the outage calendar, and a
bar chart comparing objectives across solvers.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .instance import Instance, windows_until  # noqa: E402
from .report import SolveReport  # noqa: E402

_AGENT_COLORS = ["tab:blue", "tab:orange", "tab:green", "tab:purple",
                 "tab:brown", "tab:cyan", "tab:olive", "tab:pink"]


def save_convergence(report: SolveReport, path) -> Path:
    """Lower/upper bound trace per iteration of a decomposition run."""
    if not report.iterations:
        raise ValueError("report has no iteration trace to plot")
    its = [row[0] for row in report.iterations]
    lower = [row[1] for row in report.iterations]
    upper = [row[2] for row in report.iterations]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(its, lower, where="post", label="lower bound", color="tab:blue")
    ax.step(its, upper, where="post", label="best schedule", color="tab:red")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.set_title("bound convergence")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_trajectory(instance: Instance, report: SolveReport, path) -> Path:
    """Time-space diagram: vertex rows, route polylines, shaded outages."""
    row = {v: i for i, v in enumerate(instance.vertices)}
    fig, ax = plt.subplots(figsize=(8, 4.5))

    horizon = Fraction(0)
    for legs in report.routes.values():
        for _, _, arrive in legs:
            horizon = max(horizon, arrive)
    for arc in instance.arcs:
        for w in arc.windows:
            horizon = max(horizon, w.upper)
    horizon = horizon + 1

    for arc in instance.arcs:
        for w in windows_until(arc, horizon):
            xs = [float(w.lower), float(w.upper), float(w.upper),
                  float(w.lower)]
            ys = [row[arc.tail], row[arc.tail], row[arc.head], row[arc.head]]
            ax.fill(xs, ys, color="tab:red", alpha=0.15, linewidth=0)

    for i, (agent, legs) in enumerate(sorted(report.routes.items())):
        if not legs:
            continue
        color = _AGENT_COLORS[i % len(_AGENT_COLORS)]
        prev_arrival = None
        prev_vertex = None
        for arc_id, depart, arrive in legs:
            arc = instance.arc(arc_id)
            if prev_arrival is not None and depart > prev_arrival:
                ax.plot([float(prev_arrival), float(depart)],
                        [row[prev_vertex], row[prev_vertex]],
                        color=color, linestyle=":", linewidth=1.5)
            style = "-" if instance.is_service(arc_id) else "--"
            ax.plot([float(depart), float(arrive)],
                    [row[arc.tail], row[arc.head]],
                    color=color, linestyle=style, linewidth=2,
                    label=agent if arc_id == legs[0][0] else None)
            prev_arrival, prev_vertex = arrive, arc.head
    ax.set_yticks(range(len(instance.vertices)))
    ax.set_yticklabels(instance.vertices)
    ax.set_xlabel("time (minutes)")
    ax.set_title("scheduled trajectories "
                 "(solid: service, dashed: deadhead, dotted: waiting)")
    handles, labels = ax.get_legend_handles_labels()
    if handles:
        seen = {}
        for h, l in zip(handles, labels):
            seen.setdefault(l, h)
        ax.legend(seen.values(), seen.keys())
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_comparison(reports: list[SolveReport], path) -> Path:
    """Objective bar chart across solvers."""
    named = [(r.solver, float(r.objective)) for r in reports
             if r.objective is not None]
    if not named:
        raise ValueError("no finished solves to compare")
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(named))
    ax.bar(xs, [v for _, v in named], color="tab:blue", width=0.6)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([n for n, _ in named])
    ax.set_ylabel("objective")
    ax.set_title("objective by solver")
    for x, (_, v) in zip(xs, named):
        ax.annotate(f"{v:g}", (x, v), ha="center", va="bottom")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report_figures(instance: Instance, report: SolveReport,
                          directory) -> list[Path]:
    """Write every figure that applies to this report into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if report.routes and any(report.routes.values()):
        written.append(save_trajectory(
            instance, report, directory / f"trajectory_{report.solver}.png"))
    if report.iterations:
        written.append(save_convergence(
            report, directory / f"convergence_{report.solver}.png"))
    return written
