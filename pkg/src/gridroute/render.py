"""SVG figure of a decomposition, its landmarks and one route."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .decomposition import Decomposition

CELL = 12
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


def render_svg(
    d: Decomposition,
    landmarks: Sequence[int] = (),
    route: Sequence[int] = (),
    title: str = "",
) -> str:
    g = d.base
    xs = [p[0] for p in g.pos.values()] or [0]
    ys = [p[1] for p in g.pos.values()] or [0]
    x0, y1 = min(xs), max(ys)
    w = (max(xs) - x0 + 2) * CELL
    h = (y1 - min(ys) + 2) * CELL

    def at(v: int) -> tuple[float, float]:
        x, y = g.pos[v]
        return (x - x0 + 1) * CELL, (y1 - y + 1) * CELL

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f"<title>{escape(title)}</title>",
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    half = CELL / 2
    out.append('<g id="regions" stroke="none" fill-opacity="0.8">')
    for k, reg in enumerate(sorted(d.regions, key=lambda r: r.id)):
        colour = PALETTE[k % len(PALETTE)]
        for v in sorted({d.graph.origin[u] for u in reg.nodes}):
            cx, cy = at(v)
            out.append(
                f'<rect x="{cx - half:.1f}" y="{cy - half:.1f}" width="{CELL}" height="{CELL}" '
                f'fill="{colour}" data-region="{reg.id}"/>'
            )
    out.append("</g>")
    out.append('<g id="edges" stroke="#999" stroke-width="1">')
    for a, b in g.edges():
        (ax, ay), (bx, by) = at(a), at(b)
        out.append(f'<line x1="{ax:.1f}" y1="{ay:.1f}" x2="{bx:.1f}" y2="{by:.1f}"/>')
    out.append("</g>")
    out.append('<g id="walls" stroke="#333" stroke-width="2" fill="none">')
    for reg in d.regions:
        for wall in reg.walls:
            if wall.nodes:
                out.append(f'<polyline points="{_project(d, wall.nodes, at)}" data-wall="{wall.id}"/>')
    out.append("</g>")
    out.append('<g id="gates" stroke="#d62728" stroke-width="4" stroke-linecap="round" fill="none">')
    seen = set()
    for reg in d.regions:
        for gate in reg.gates:
            key = tuple(sorted(d.graph.origin[v] for v in gate.nodes))
            if key in seen:
                continue
            seen.add(key)
            out.append(f'<polyline points="{_project(d, gate.nodes, at)}" data-gate="{gate.id}"/>')
    out.append("</g>")
    out.append('<g id="landmarks" fill="black">')
    for v in sorted(landmarks):
        cx, cy = at(v)
        out.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{CELL / 4:.1f}"/>')
    out.append("</g>")
    if len(route) > 1:
        pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in (at(v) for v in route))
        out.append(f'<polyline id="route" points="{pts}" stroke="#1f77b4" stroke-width="3" fill="none"/>')
    out.append("</svg>")
    return "\n".join(line for line in out if line) + "\n"


def _project(d: Decomposition, vids: Sequence[int], at) -> str:
    return " ".join(f"{x:.1f},{y:.1f}" for x, y in (at(d.graph.origin[v]) for v in vids))
