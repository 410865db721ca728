"""Rendering: deterministic SVG network drawings and matplotlib figures.

The SVG path is hand-rolled so that a solve with a fixed seed renders to
byte-identical output (fixed float formatting, no timestamps, no library
version strings).  The PNG/CSV helpers wrap matplotlib with a house style
and are meant for the report directories written by the command line
tool; they make no determinism promise.
"""

from __future__ import annotations

import csv
import math
import os
from typing import Any, Sequence

from .energy import multiplicity
from .model import (
    EulerianCompetitor,
    Instance,
    LagrangianCompetitor,
    ValidationError,
)

_SOURCE_COLOR = "#b03a2e"
_TARGET_COLOR = "#1f618d"
_PLAIN_COLOR = "#7f8c8d"
_EDGE_COLOR = "#95a5a6"
_LOAD_COLOR = "#273746"
_SCENARIO_COLORS = ("#c0392b", "#2471a3", "#1e8449", "#b7950b", "#884ea0", "#ca6f1e")


def _fmt(x: float) -> str:
    out = f"{x:.2f}"
    return "0.00" if out == "-0.00" else out


def _edge_loads(
    inst: Instance, competitor: EulerianCompetitor | LagrangianCompetitor | None
) -> list[float]:
    if competitor is None:
        return [0.0] * inst.graph.n_edges
    if isinstance(competitor, EulerianCompetitor):
        return list(competitor.theta)
    return [multiplicity(competitor.plan, e) for e in range(inst.graph.n_edges)]


def _scenario_flows(
    inst: Instance, competitor: EulerianCompetitor | LagrangianCompetitor | None
) -> list[list[float]]:
    """Per-scenario net edge flow (positive = along the edge's u->v axis)."""
    n_e = inst.graph.n_edges
    if competitor is None:
        return [[0.0] * n_e for _ in inst.scenarios]
    if isinstance(competitor, EulerianCompetitor):
        return [list(f) for f in competitor.flows]
    flows = [[0.0] * n_e for _ in inst.scenarios]
    for i, sub in enumerate(competitor.subplans):
        for (path, _), w in zip(competitor.plan, sub):
            if w <= 0.0:
                continue
            for k, e_id in enumerate(path.edges):
                edge = inst.graph.edges[e_id]
                forward = path.vertices[k] == edge.u
                flows[i][e_id] += w if forward else -w
    return flows


class _Canvas:
    """Pixel mapping shared by every layer of one drawing."""

    def __init__(self, inst: Instance, width: int) -> None:
        xs = [v.pos[0] for v in inst.graph.vertices]
        ys = [v.pos[1] for v in inst.graph.vertices]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        pad = 0.08 * max(x1 - x0, y1 - y0, 1e-9)
        self.x0, self.x1 = x0 - pad, x1 + pad
        self.y0, self.y1 = y0 - pad, y1 + pad
        self.width = width
        self.scale = (width - 20) / (self.x1 - self.x0)
        self.height = int(math.ceil((self.y1 - self.y0) * self.scale)) + 20

    def to_px(self, p: Sequence[float]) -> tuple[float, float]:
        return (
            10 + (p[0] - self.x0) * self.scale,
            self.height - 10 - (p[1] - self.y0) * self.scale,
        )


def _edge_anchor(
    canvas: _Canvas, inst: Instance, edge_id: int, dup_rank: dict[int, int]
) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
    """Midpoint and endpoints of an edge's drawn curve, duplicates bowed."""
    e = inst.graph.edges[edge_id]
    a = canvas.to_px(inst.graph.position(e.u))
    b = canvas.to_px(inst.graph.position(e.v))
    dup = dup_rank[edge_id]
    if dup == 0:
        mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    else:
        cx, cy = _bow_control(a, b, dup)
        # quadratic Bezier at t = 1/2
        mid = (0.25 * a[0] + 0.5 * cx + 0.25 * b[0], 0.25 * a[1] + 0.5 * cy + 0.25 * b[1])
    return a, b, mid


def _bow_control(
    a: tuple[float, float], b: tuple[float, float], dup: int
) -> tuple[float, float]:
    mx, my = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    dx, dy = b[0] - a[0], b[1] - a[1]
    norm = math.hypot(dx, dy) or 1.0
    off = 28.0 * dup
    return mx - dy / norm * off, my + dx / norm * off


def _edge_path(
    a: tuple[float, float], b: tuple[float, float], dup: int, stroke: str, sw: float, extra: str = ""
) -> str:
    if dup == 0:
        return (
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" '
            f'y2="{_fmt(b[1])}" stroke="{stroke}" stroke-width="{_fmt(sw)}"{extra}/>'
        )
    cx, cy = _bow_control(a, b, dup)
    return (
        f'<path d="M {_fmt(a[0])} {_fmt(a[1])} Q {_fmt(cx)} {_fmt(cy)} '
        f'{_fmt(b[0])} {_fmt(b[1])}" fill="none" stroke="{stroke}" '
        f'stroke-width="{_fmt(sw)}"{extra}/>'
    )


def _arrow(
    mid: tuple[float, float],
    a: tuple[float, float],
    b: tuple[float, float],
    sign: float,
    color: str,
) -> str:
    """Small triangle at the edge midpoint pointing along the flow."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    norm = math.hypot(dx, dy) or 1.0
    ux, uy = dx / norm * sign, dy / norm * sign
    nx, ny = -uy, ux
    s = 6.0
    tip = (mid[0] + ux * s, mid[1] + uy * s)
    left = (mid[0] - ux * s + nx * s * 0.6, mid[1] - uy * s + ny * s * 0.6)
    right = (mid[0] - ux * s - nx * s * 0.6, mid[1] - uy * s - ny * s * 0.6)
    pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (tip, left, right))
    return f'<polygon points="{pts}" fill="{color}"/>'


def render_svg(
    inst: Instance,
    competitor: EulerianCompetitor | LagrangianCompetitor | None = None,
    width: int = 720,
) -> str:
    """Draw a planar instance (and optionally a competitor) as SVG text.

    The base layer shows every edge with stroke width growing with its
    capacity (capacity competitors) or route multiplicity (route
    competitors); sources are warm dots, targets cold, radius growing with
    boundary mass, and parallel edges bow outward so both stay visible.
    On top sits one ``<g id="scenario-K">`` group per damage scenario
    holding that scenario's dead edges (dashed) and its recovery flow
    (arrowheads at edge midpoints).  Output is deterministic: two-decimal
    coordinates and no timestamps, so identical inputs give identical
    bytes.
    """
    if inst.graph.dimension != 2:
        raise ValidationError(
            f"render: needs a 2-dimensional embedding, got dimension {inst.graph.dimension}"
        )
    canvas = _Canvas(inst, width)
    loads = _edge_loads(inst, competitor)
    flows = _scenario_flows(inst, competitor)
    max_load = max(loads) if any(l > 0 for l in loads) else 0.0

    # rank parallel duplicates once so every layer bows them identically
    pair_seen: dict[tuple[int, int], int] = {}
    dup_rank: dict[int, int] = {}
    for e in inst.graph.edges:
        key = (min(e.u, e.v), max(e.u, e.v))
        dup_rank[e.id] = pair_seen.get(key, 0)
        pair_seen[key] = dup_rank[e.id] + 1

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{canvas.width}" '
        f'height="{canvas.height}" viewBox="0 0 {canvas.width} {canvas.height}">'
    )
    parts.append(
        f'<rect width="{canvas.width}" height="{canvas.height}" fill="#fdfefe"/>'
    )

    parts.append('<g id="network">')
    for e in inst.graph.edges:
        a, b, _ = _edge_anchor(canvas, inst, e.id, dup_rank)
        if loads[e.id] > 0.0 and max_load > 0.0:
            stroke = _LOAD_COLOR
            sw = 1.5 + 6.0 * (loads[e.id] / max_load)
        else:
            stroke = _EDGE_COLOR
            sw = 1.0
        parts.append(_edge_path(a, b, dup_rank[e.id], stroke, sw))
    parts.append("</g>")

    for scen in inst.scenarios:
        eff = scen.edge_efficiencies(inst.graph)
        color = _SCENARIO_COLORS[scen.id % len(_SCENARIO_COLORS)]
        parts.append(f'<g id="scenario-{scen.id}">')
        for e in inst.graph.edges:
            a, b, mid = _edge_anchor(canvas, inst, e.id, dup_rank)
            if eff[e.id] == 0.0:
                parts.append(
                    _edge_path(
                        a, b, dup_rank[e.id], color, 1.2,
                        extra=' stroke-dasharray="5 4" opacity="0.8"',
                    )
                )
            flow = flows[scen.id][e.id]
            if abs(flow) > 1e-12:
                parts.append(_arrow(mid, a, b, 1.0 if flow > 0 else -1.0, color))
        parts.append("</g>")

    max_mass = max((abs(m) for m in inst.boundary.atoms.values()), default=0.0)
    parts.append('<g id="boundary">')
    for v in inst.graph.vertices:
        px, py = canvas.to_px(v.pos)
        mass = inst.boundary.atoms.get(v.id, 0.0)
        if mass < 0.0:
            fill = _SOURCE_COLOR
        elif mass > 0.0:
            fill = _TARGET_COLOR
        else:
            fill = _PLAIN_COLOR
        r = 2.5
        if mass != 0.0 and max_mass > 0.0:
            r = 4.0 + 4.0 * math.sqrt(abs(mass) / max_mass)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r)}" fill="{fill}"/>'
        )
        if mass != 0.0:
            parts.append(
                f'<text x="{_fmt(px + r + 2.0)}" y="{_fmt(py - r - 2.0)}" '
                f'font-family="Helvetica,Arial,sans-serif" font-size="10" '
                f'fill="#424949">{v.id}</text>'
            )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written report."""
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# matplotlib helpers (PNG output, no determinism promise)

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(_RC)
    return plt


def write_trace_csv(trace: Sequence[float], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "energy"])
        for k, e in enumerate(trace):
            writer.writerow([k, repr(e)])


def save_trace_figure(trace: Sequence[float], path: str, title: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots()
    ax.plot(range(len(trace)), trace, marker="o", markersize=3, color="#1f618d")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_network_figure(
    inst: Instance,
    competitor: EulerianCompetitor | LagrangianCompetitor | None,
    path: str,
    title: str,
) -> None:
    if inst.graph.dimension != 2:
        raise ValidationError(
            f"render: needs a 2-dimensional embedding, got dimension {inst.graph.dimension}"
        )
    plt = _pyplot()
    fig, ax = plt.subplots()
    loads = _edge_loads(inst, competitor)
    max_load = max(loads) if any(l > 0 for l in loads) else 0.0
    for e in inst.graph.edges:
        a = inst.graph.position(e.u)
        b = inst.graph.position(e.v)
        if loads[e.id] > 0.0 and max_load > 0.0:
            lw = 0.8 + 3.5 * loads[e.id] / max_load
            color = _LOAD_COLOR
        else:
            lw, color = 0.6, _EDGE_COLOR
        ax.plot([a[0], b[0]], [a[1], b[1]], color=color, linewidth=lw, zorder=1)
    for v in inst.graph.vertices:
        mass = inst.boundary.atoms.get(v.id, 0.0)
        color = _SOURCE_COLOR if mass < 0 else _TARGET_COLOR if mass > 0 else _PLAIN_COLOR
        size = 12 if mass == 0 else 30
        ax.scatter([v.pos[0]], [v.pos[1]], s=size, color=color, zorder=2)
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_series_csv(series: dict[str, Sequence[float]], path: str) -> None:
    keys = list(series)
    rows = zip(*(series[k] for k in keys)) if keys else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(keys)
        for row in rows:
            writer.writerow([repr(x) for x in row])


def save_series_figure(
    series: dict[str, Sequence[float]], path: str, title: str
) -> None:
    plt = _pyplot()
    keys = list(series)
    fig, ax = plt.subplots()
    if keys:
        x_key = keys[0]
        xs = series[x_key]
        for k in keys[1:]:
            ax.plot(xs, series[k], marker="o", markersize=3, label=k)
        ax.set_xlabel(x_key)
        if len(keys) > 1:
            ax.legend()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_solve_figures(
    inst: Instance, report: Any, outdir: str
) -> list[str]:
    """Trace CSV/PNG and a loaded-network PNG for one solve report."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    p_csv = os.path.join(outdir, "trace.csv")
    write_trace_csv(report.trace, p_csv)
    written.append(p_csv)
    p_trace = os.path.join(outdir, "trace.png")
    save_trace_figure(report.trace, p_trace, f"{report.mode} descent")
    written.append(p_trace)
    if inst.graph.dimension == 2:
        p_net = os.path.join(outdir, "network.png")
        save_network_figure(inst, report.competitor, p_net, f"{report.mode} load")
        written.append(p_net)
    return written


def save_phenomenon_figures(report: Any, outdir: str) -> list[str]:
    """Series CSV/PNG for one phenomenon verification report."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    p_csv = os.path.join(outdir, "series.csv")
    write_series_csv(report.series, p_csv)
    written.append(p_csv)
    p_png = os.path.join(outdir, "series.png")
    save_series_figure(report.series, p_png, report.example)
    written.append(p_png)
    return written
