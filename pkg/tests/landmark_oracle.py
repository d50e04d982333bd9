"""Brute-force evaluation of the landmark rules, from positions and walls only."""

from __future__ import annotations


def _walk(r, v, dirs):
    out = [v]
    for d in dirs:
        u = v
        while d in r.adj[u]:
            u = r.adj[u][d]
            out.append(u)
    return out


def _perp_run(r, v, gate_orientation):
    dirs = ((1, 0), (-1, 0)) if gate_orientation == "v" else ((0, 1), (0, -1))
    # ordered from one end to the other
    back = _walk(r, v, [dirs[1]])[1:]
    fwd = _walk(r, v, [dirs[0]])
    return back[::-1] + fwd


def brute_landmarks(d) -> dict[int, str]:
    g = d.graph
    o = g.origin
    kinds: dict[int, str] = {}
    for reg in d.regions:
        r = d.region_graph(reg.id)
        walls = [set(w.nodes) for w in reg.walls]
        for gate in reg.gates:
            others = {u for h in reg.gates if h.id != gate.id for u in h.nodes}
            for i, v in enumerate(gate.nodes):
                if i in (0, len(gate.nodes) - 1):
                    kinds[o[v]] = "endpoint"
                    continue
                run = _perp_run(r, v, gate.orientation)
                far = [x for x in (run[0], run[-1]) if x != v] or [v]
                hit = any(
                    any(p in w for p in run[1:-1]) and any(u in w or u in others for u in far)
                    for w in walls
                )
                if hit and kinds.get(o[v]) != "endpoint":
                    kinds[o[v]] = "overhang"
    primary = dict(kinds)
    base = d.base
    for reg in d.regions:
        for gate in reg.gates:
            for v in gate.nodes:
                if o[v] in kinds:
                    continue
                x, y = base.pos[o[v]]
                line = []
                step = (1, 0) if gate.orientation == "v" else (0, 1)
                for sgn in (1, -1):
                    k = 0
                    while True:
                        q = base.at((x + sgn * k * step[0], y + sgn * k * step[1]))
                        if q is None:
                            break
                        line.append(q)
                        k += 1
                if any(q in primary for q in line):
                    kinds[o[v]] = "projected"
    return kinds
