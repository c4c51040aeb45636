"""Static figure rendering from simulator CSV artifacts.

Five figure kinds: status time series, leader-count distribution, tenure
views, log-log in-degree distribution with fitted slope overlay, and a
force-layout network snapshot.  Inputs are never mutated and nothing is
recomputed beyond axis transforms; the fitted line comes from
analysis.json as produced by the simulator's analyze command.  Renders are
reproducible: fixed layout seed, fixed styling, and timestamp-free output
metadata.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402
import numpy as np  # noqa: E402

from . import csvdata  # noqa: E402
from .csvdata import SchemaError  # noqa: E402

KINDS = ("timeseries", "leadercount", "tenure", "degree", "network")

matplotlib.rcParams["svg.hashsalt"] = "allianceplots"


@dataclass
class PlotJob:
    in_dir: str
    kind: str
    out_path: str
    threshold: float | None = None  # default: analysis.json value, else 3.0
    log_axes: bool = True           # degree plot axes
    fit_overlay: bool = True
    dpi: int = 150
    layout_seed: int = 42


@dataclass
class RenderInfo:
    kind: str
    path: str
    overlay_slope: float | None = None
    note: str = ""


def _input(job: PlotJob, name: str) -> str:
    path = os.path.join(job.in_dir, name)
    if not os.path.exists(path):
        raise FileNotFoundError(f"{name} not found in {job.in_dir}")
    return path


def _optional(job: PlotJob, name: str) -> str | None:
    path = os.path.join(job.in_dir, name)
    return path if os.path.exists(path) else None


def _threshold(job: PlotJob) -> float:
    if job.threshold is not None:
        return job.threshold
    analysis = _optional(job, "analysis.json")
    if analysis is not None:
        return float(csvdata.read_analysis(analysis)["threshold"])
    return 3.0


def _save(fig, job: PlotJob) -> None:
    ext = os.path.splitext(job.out_path)[1].lower()
    metadata = {".png": {"Software": None},
                ".svg": {"Date": None},
                ".pdf": {"CreationDate": None}}.get(ext)
    fig.savefig(job.out_path, dpi=job.dpi, metadata=metadata)
    plt.close(fig)


def _render_timeseries(job: PlotJob) -> RenderInfo:
    series = csvdata.read_timeseries(_input(job, "timeseries.csv"))
    theta = _threshold(job)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    snapshots_path = _optional(job, "status_snapshots.csv")
    note = ""
    if snapshots_path is not None:
        snaps = csvdata.read_snapshots(snapshots_path)
        ax.plot(snaps.step, snaps.statuses, color="0.75", linewidth=0.5,
                zorder=1)
        note = f"{snaps.statuses.shape[1]} individual trajectories"
    ax.plot(series.step, series.leader_status, color="C0", linewidth=0.9,
            zorder=2, label="leader status")
    ax.axhline(theta, color="C3", linestyle="--", linewidth=1.0,
               label=f"threshold {theta:g}")
    ax.set_xlabel("step")
    ax.set_ylabel("status")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    _save(fig, job)
    return RenderInfo("timeseries", job.out_path, note=note)


def _render_leadercount(job: PlotJob) -> RenderInfo:
    series = csvdata.read_timeseries(_input(job, "timeseries.csv"))
    counts = np.bincount(series.count_above)
    fractions = counts / series.count_above.shape[0]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(np.arange(fractions.size), fractions, color="C0", width=0.7)
    ax.set_xlabel("individuals above threshold")
    ax.set_ylabel("fraction of steps")
    ax.set_xticks(np.arange(fractions.size))
    fig.tight_layout()
    _save(fig, job)
    return RenderInfo("leadercount", job.out_path)


def _render_tenure(job: PlotJob) -> RenderInfo:
    sweep_path = _optional(job, "sweep.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    if sweep_path is not None:
        table = csvdata.read_sweep(sweep_path)
        qs = np.unique(table.q)
        medians = np.array([np.median(table.median_tenure[table.q == q])
                            for q in qs])
        ax.plot(qs, medians, marker="o", color="C0")
        ax.set_xlabel("inequality parameter q")
        ax.set_ylabel("median tenure (steps)")
        note = f"{qs.size} sweep points"
    else:
        episodes = csvdata.read_episodes(_input(job, "episodes.csv"))
        if len(episodes) == 0:
            ax.set_xlabel("tenure (steps)")
            ax.set_ylabel("episodes")
            ax.annotate("no episodes", xy=(0.5, 0.5),
                        xycoords="axes fraction", ha="center", va="center",
                        fontsize=14, color="0.4")
            note = "no episodes"
        else:
            tenures = episodes.tenure_above
            ax.hist(tenures, bins=min(40, max(5, len(episodes) // 5)),
                    color="C0")
            ax.axvline(float(np.median(tenures)), color="C3", linestyle="--",
                       linewidth=1.0, label=f"median {np.median(tenures):g}")
            ax.axvline(float(np.mean(tenures)), color="C2", linestyle=":",
                       linewidth=1.0, label=f"mean {np.mean(tenures):.0f}")
            ax.set_xlabel("tenure (steps)")
            ax.set_ylabel("episodes")
            ax.legend(fontsize=8)
            note = f"{len(episodes)} episodes"
    fig.tight_layout()
    _save(fig, job)
    return RenderInfo("tenure", job.out_path, note=note)


def _render_degree(job: PlotJob) -> RenderInfo:
    hist = csvdata.read_histogram(_input(job, "histogram.csv"))
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    positive = hist.in_degree > 0 if job.log_axes else np.ones_like(
        hist.in_degree, dtype=bool)
    ax.plot(hist.in_degree[positive], hist.frequency[positive], "o",
            markersize=4, color="C0", label="observed")
    slope = None
    analysis_path = _optional(job, "analysis.json")
    if job.fit_overlay and analysis_path is not None:
        fit = csvdata.read_analysis(analysis_path).get("fit")
        if fit:
            slope = float(fit["exponent"])
            xs = np.linspace(max(fit["x_min"], 1), fit["x_max"], 64)
            ys = np.exp(fit["intercept"]) * xs ** slope
            ax.plot(xs, ys, color="C3", linewidth=1.2,
                    label=f"fit slope {slope:.2f} (R$^2$={fit['r_squared']:.2f})")
    if job.log_axes:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("incoming links")
    ax.set_ylabel("frequency")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, job)
    return RenderInfo("degree", job.out_path, overlay_slope=slope)


def _render_network(job: PlotJob) -> RenderInfo:
    state = csvdata.read_final_state(_input(job, "final_state.csv"))
    graph = nx.DiGraph()
    graph.add_nodes_from(state.individual.tolist())
    for i, targets in zip(state.individual, state.targets):
        for j in targets:
            graph.add_edge(int(i), int(j))
    positions = nx.spring_layout(graph, seed=job.layout_seed)
    status = state.status
    top = float(status.max()) if status.size else 1.0
    sizes = 40.0 + 260.0 * status / max(top, 1e-12)
    fig, ax = plt.subplots(figsize=(6, 6))
    nx.draw_networkx_edges(graph, positions, ax=ax, edge_color="0.8",
                           arrows=True, arrowsize=6, width=0.6)
    nodes = nx.draw_networkx_nodes(graph, positions, ax=ax, node_size=sizes,
                                   node_color=status, cmap="viridis")
    nodes.set_edgecolor("0.3")
    fig.colorbar(nodes, ax=ax, shrink=0.8, label="status")
    ax.set_axis_off()
    fig.tight_layout()
    _save(fig, job)
    return RenderInfo("network", job.out_path,
                      note=f"{graph.number_of_nodes()} nodes, "
                           f"{graph.number_of_edges()} links")


_RENDERERS = {
    "timeseries": _render_timeseries,
    "leadercount": _render_leadercount,
    "tenure": _render_tenure,
    "degree": _render_degree,
    "network": _render_network,
}


def render(job: PlotJob) -> RenderInfo:
    """Render one figure; returns what was drawn (path, overlay slope)."""
    if job.kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind {job.kind!r}; "
                          f"expected one of {KINDS}")
    return _RENDERERS[job.kind](job)
