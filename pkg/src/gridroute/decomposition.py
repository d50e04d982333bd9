"""Three-stage splitting of a grid graph into simple, path-convex regions.

Stage one removes every inner hole by cutting a channel from the hole's
leftmost boundary node.  Stage two cuts at junction portals so that every
region has at most two gates.  Stage three cuts each two-gate region (a
tunnel) along a few portals chosen from the gate-to-gate distance profile.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import NotOnPortal, ProfileNotUnimodal
from .grid import (
    E,
    N,
    S,
    W,
    GridGraph,
    axis_distances,
    bfs,
    components,
    count_inner_holes,
    face_walks,
    inner_holes,
)
from .hybrid import RoundLedger, assign_hole_ids, ceil_log2
from .virtual import VirtualGraph, split_line, split_node, straight_run


@dataclass(frozen=True)
class Gate:
    id: int
    region: int
    orientation: str  # "v" or "h"
    nodes: tuple[int, ...]  # ordered south to north (west to east for "h")


@dataclass(frozen=True)
class Wall:
    id: int
    region: int
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class Region:
    id: int
    nodes: tuple[int, ...]
    gates: tuple[Gate, ...]
    walls: tuple[Wall, ...]


@dataclass
class Decomposition:
    base: GridGraph
    vg: VirtualGraph
    regions: list[Region]
    stage: str
    ledger: RoundLedger = field(default_factory=RoundLedger)
    hole_count: int = 0
    tunnel_sizes: dict[int, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    _graphs: dict[int, GridGraph] = field(default_factory=dict, repr=False)

    @property
    def graph(self) -> GridGraph:
        return self.vg.graph

    def region(self, rid: int) -> Region:
        return self._by_id()[rid]

    def _by_id(self) -> dict[int, Region]:
        if not hasattr(self, "_idx") or len(self._idx) != len(self.regions):
            self._idx = {r.id: r for r in self.regions}
        return self._idx

    def region_graph(self, rid: int) -> GridGraph:
        if rid not in self._graphs:
            self._graphs[rid] = self.graph.subgraph(self.region(rid).nodes)
        return self._graphs[rid]

    def projected(self, rid: int) -> frozenset[int]:
        return frozenset(self.graph.origin[v] for v in self.region(rid).nodes)

    def regions_of(self) -> dict[int, list[int]]:
        """Original node -> sorted ids of the regions holding a copy of it."""
        out: dict[int, set[int]] = {}
        for r in self.regions:
            for v in r.nodes:
                out.setdefault(self.graph.origin[v], set()).add(r.id)
        return {v: sorted(s) for v, s in out.items()}

    def region_of_vid(self) -> dict[int, int]:
        return {v: r.id for r in self.regions for v in r.nodes}

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "regions": [
                {
                    "id": r.id,
                    "nodes": list(r.nodes),
                    "gates": [{"id": g.id, "orientation": g.orientation, "nodes": list(g.nodes)} for g in r.gates],
                    "walls": [{"id": w.id, "nodes": list(w.nodes)} for w in r.walls],
                }
                for r in self.regions
            ],
            "projection": {str(v): o for v, o in sorted(self.graph.origin.items())},
            "positions": {str(v): list(p) for v, p in sorted(self.graph.pos.items())},
        }


# --- region structure ------------------------------------------------------


def _signed_area(r: GridGraph, walk: list) -> float:
    a = 0
    for v, d in walk:
        x, y = r.pos[v]
        a += x * (y + d[1]) - (x + d[0]) * y
    return a / 2


def outer_walk(r: GridGraph) -> list[int]:
    """Boundary walk of the unbounded face of a connected region."""
    walks = face_walks(r)
    if not walks:
        return r.nodes()[:1]
    best = min(walks, key=lambda w: (_signed_area(r, w), w[0][0]))
    return [v for v, _ in best]


def region_gates(r: GridGraph, rid: int) -> list[Gate]:
    out = []
    for orient, (lo, hi) in (("v", (S, N)), ("h", (W, E))):
        marked = {v for v in r.pos if orient in r.tags.get(v, ())}
        for v in sorted(marked):
            u = r.adj[v].get(lo)
            if u is not None and u in marked:
                continue
            run = [v]
            while True:
                u = r.adj[run[-1]].get(hi)
                if u is None or u not in marked:
                    break
                run.append(u)
            gid = 2 * min(run) + (0 if orient == "v" else 1)
            out.append(Gate(gid, rid, orient, tuple(run)))
    return sorted(out, key=lambda g: g.id)


def _wall_positions(walk: list[int], gate_nodes: set[int]) -> list[int | None]:
    """Wall index per walk position (None on gate nodes)."""
    L = len(walk)
    flags = [v in gate_nodes for v in walk]
    if not any(flags):
        return [0] * L
    k0 = flags.index(True)
    out: list[int | None] = [None] * L
    nxt = 0
    open_run = False
    for k in range(k0, k0 + L):
        i = k % L
        if flags[i]:
            if open_run:
                nxt += 1
                open_run = False
        else:
            out[i] = nxt
            open_run = True
    return out


def region_walls(r: GridGraph, rid: int, gate_nodes: set[int], start_id: int) -> list[Wall]:
    walk = outer_walk(r)
    labels = _wall_positions(walk, gate_nodes)
    runs: dict[int, list[int]] = {}
    for v, lab in zip(walk, labels):
        if lab is not None:
            runs.setdefault(lab, []).append(v)
    return [Wall(start_id + i, rid, tuple(dict.fromkeys(runs[i]))) for i in sorted(runs)]


def wall_incidence(r: GridGraph, reg: Region) -> dict[int, set[int]]:
    """Walls met by each node: its own walls, plus for gate nodes the walls
    next to it on the boundary walk."""
    gate_nodes = {v for gt in reg.gates for v in gt.nodes}
    walk = outer_walk(r)
    labels = _wall_positions(walk, gate_nodes)
    base = reg.walls[0].id if reg.walls else 0
    out: dict[int, set[int]] = {}
    L = len(walk)
    for i, v in enumerate(walk):
        if labels[i] is not None:
            out.setdefault(v, set()).add(base + labels[i])
        else:
            for j in (i - 1, i + 1):
                lab = labels[j % L]
                if lab is not None:
                    out.setdefault(v, set()).add(base + lab)
    return out


def build_regions(vg: VirtualGraph) -> list[Region]:
    g = vg.graph
    out = []
    wall_id = 0
    for comp in components(g):
        rid = comp[0]
        r = g.subgraph(comp)
        gates = region_gates(r, rid)
        gate_nodes = {v for gt in gates for v in gt.nodes}
        walls = region_walls(r, rid, gate_nodes, wall_id)
        wall_id += len(walls)
        out.append(Region(rid, tuple(comp), tuple(gates), tuple(walls)))
    return out


def _charge(ledger: RoundLedger, stage: str, size: int, n: int, times: int = 1) -> None:
    ledger.charge(stage, size, times * max(1, ceil_log2(n)))


# --- stage one -------------------------------------------------------------


def splitting_node(g: GridGraph, boundary: Iterable[int]) -> int:
    """Leftmost boundary node, northernmost among ties."""
    return min(set(boundary), key=lambda v: (g.pos[v][0], -g.pos[v][1]))


def simple_decomposition(g: GridGraph, ledger: RoundLedger | None = None) -> Decomposition:
    ledger = ledger if ledger is not None else RoundLedger()
    holes = sorted(inner_holes(g), key=lambda h: h.id)
    if holes:
        assign_hole_ids(g, ledger)
    vg = VirtualGraph.from_grid(g)
    # group holes whose splitting nodes share a vertical portal
    groups: dict[tuple[int, ...], list[int]] = {}
    order: list[tuple[int, ...]] = []
    for h in holes:
        v = splitting_node(g, h.boundary)
        key = tuple(straight_run(g, v, True))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(v)
    for key in order:
        vg = split_line(vg, key, vertical=True)
        twin = dict(zip(vg.records[-1].nodes, vg.records[-1].created))
        for v in sorted(set(groups[key]), key=lambda u: -g.pos[u][1]):
            # the right copy loses the link between its east and south edges
            vg = split_node(vg, twin[v], keep_first=(N, E), vertical=True)
    if holes:
        _charge(ledger, "simple_decomposition", len(holes), g.n, 2)
    d = Decomposition(g, vg, build_regions(vg), "simple", ledger, len(holes))
    return d


# --- stage two -------------------------------------------------------------


@dataclass(frozen=True)
class Junction:
    region: int
    portal: tuple[int, ...]
    left: tuple[tuple[int, ...], ...]  # qualifying adjacent portals, north to south
    right: tuple[tuple[int, ...], ...]


def _portals(r: GridGraph) -> tuple[list[tuple[int, ...]], dict[int, int]]:
    runs, of = [], {}
    for v in r.nodes():
        if S in r.adj[v]:
            continue
        run = tuple(straight_run(r, v, True))
        for u in run:
            of[u] = len(runs)
        runs.append(run)
    return runs, of


def find_junction_portals(d: Decomposition) -> list[Junction]:
    out = []
    for reg in d.regions:
        r = d.region_graph(reg.id)
        wall_of = wall_incidence(r, reg)
        runs, of = _portals(r)
        walls = [set().union(*(wall_of.get(v, set()) for v in run)) for run in runs]
        qual = [len(w) >= 2 for w in walls]
        # portals joined by any horizontal edge are adjacent (portal tree adjacency)
        pairs: set[tuple[int, int]] = set()
        for v in r.pos:
            u = r.adj[v].get(E)
            if u is not None:
                pairs.add((of[v], of[u]))
        left: dict[int, list[int]] = {}
        right: dict[int, list[int]] = {}
        for a, b in sorted(pairs):
            right.setdefault(a, []).append(b)
            left.setdefault(b, []).append(a)
        for i, run in enumerate(runs):
            lq = [j for j in left.get(i, []) if qual[j]]
            rq = [j for j in right.get(i, []) if qual[j]]
            is_gate = all("v" in r.tags.get(v, ()) for v in run)
            k = len(lq) + len(rq)
            if k >= 3 or (is_gate and k >= 2):
                key = lambda j: -r.pos[runs[j][-1]][1]
                out.append(
                    Junction(
                        reg.id,
                        run,
                        tuple(runs[j] for j in sorted(lq, key=key)),
                        tuple(runs[j] for j in sorted(rq, key=key)),
                    )
                )
    return out


def fallback_junctions(d: Decomposition) -> list[Junction]:
    """Cut points for regions that still have more than two gates.

    The gate portals of such a region span a subtree of its portal tree.  A
    branching portal of that subtree, or a gate portal inside it, is split
    like a junction with the subtree neighbours as the separated portals.
    """
    out = []
    for reg in d.regions:
        if len([g for g in reg.gates if g.orientation == "v"]) <= 2:
            continue
        r = d.region_graph(reg.id)
        runs, of = _portals(r)
        adj: dict[int, set[int]] = {i: set() for i in range(len(runs))}
        for v in r.pos:
            u = r.adj[v].get(E)
            if u is not None:
                adj[of[v]].add(of[u])
                adj[of[u]].add(of[v])
        terminals = {of[g.nodes[0]] for g in reg.gates if g.orientation == "v"}
        alive = set(adj)
        leaves = [i for i in alive if len(adj[i]) <= 1 and i not in terminals]
        while leaves:
            i = leaves.pop()
            if i not in alive:
                continue
            alive.discard(i)
            for j in adj[i] & alive:
                if len(adj[j] & alive) <= 1 and j not in terminals:
                    leaves.append(j)
        for i in sorted(alive, key=lambda i: min(runs[i])):
            nb = adj[i] & alive
            if len(nb) >= 3 or (i in terminals and len(nb) >= 2):
                x = r.pos[runs[i][0]][0]
                key = lambda j: -r.pos[runs[j][-1]][1]
                lq = sorted((j for j in nb if r.pos[runs[j][0]][0] < x), key=key)
                rq = sorted((j for j in nb if r.pos[runs[j][0]][0] > x), key=key)
                out.append(Junction(reg.id, runs[i], tuple(runs[j] for j in lq), tuple(runs[j] for j in rq)))
                break
    return out


def _apply_junction(vg: VirtualGraph, j: Junction) -> VirtualGraph:
    g = vg.graph
    vg = split_line(vg, j.portal, vertical=True)
    twin = dict(zip(vg.records[-1].nodes, vg.records[-1].created))
    for side, portals, keep in ((W, j.left, (N, W)), (E, j.right, (N, E))):
        for qp in portals[:-1]:
            qset = set(qp)
            touching = [v for v in j.portal if g.adj[v].get(side) in qset]
            if not touching:
                continue
            y = min(touching, key=lambda v: g.pos[v][1])
            c = y if side == W else twin[y]
            if S in vg.graph.adj[c]:
                vg = split_node(vg, c, keep_first=keep, vertical=True)
    return vg


def split_junctions(d: Decomposition, max_passes: int = 8) -> Decomposition:
    vg = d.vg
    cur = d
    passes = fallback = 0
    while passes < max_passes:
        junctions = find_junction_portals(cur)
        if not junctions:
            junctions = fallback_junctions(cur)
            fallback += len(junctions)
        if not junctions:
            break
        passes += 1
        for j in junctions:
            vg = _apply_junction(vg, j)
        cur = Decomposition(d.base, vg, build_regions(vg), "tunnel", d.ledger, d.hole_count, notes=list(cur.notes))
    cur.stage = "tunnel"
    if fallback:
        cur.notes.append(f"fallback junction splits: {fallback}")
    _charge(d.ledger, "tunnel_decomposition", len(cur.regions), d.base.n, 2)
    return cur


def portal_tree_no_cavities(r: GridGraph, reg: Region) -> dict[tuple[int, ...], set[tuple[int, ...]]]:
    """Vertical portal tree with single-wall leaves pruned repeatedly."""
    wall_of = wall_incidence(r, reg)
    runs, of = _portals(r)
    adj: dict[int, set[int]] = {i: set() for i in range(len(runs))}
    for v in r.pos:
        u = r.adj[v].get(E)
        if u is not None:
            adj[of[v]].add(of[u])
            adj[of[u]].add(of[v])
    nwalls = [len(set().union(*(wall_of.get(v, set()) for v in run))) for run in runs]
    alive = set(adj)
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            deg = len(adj[i] & alive)
            if deg <= 1 and nwalls[i] <= 1:
                alive.discard(i)
                changed = True
    return {runs[i]: {runs[j] for j in adj[i] & alive} for i in alive}


# --- stage three -----------------------------------------------------------


def _profile_shape(vals: list[int]) -> tuple[int, int]:
    """Return (i1, i2), the bounds of the minimum plateau; raise if not unimodal."""
    m = min(vals)
    i1 = vals.index(m)
    i2 = len(vals) - 1 - vals[::-1].index(m)
    ok = all(vals[k] > vals[k + 1] for k in range(i1)) and all(
        vals[k] < vals[k + 1] for k in range(i2, len(vals) - 1)
    )
    ok = ok and all(v == m for v in vals[i1 : i2 + 1])
    if not ok or (m > 0 and i1 != i2):
        raise ProfileNotUnimodal(f"gate distance profile {vals} is not unimodal")
    return i1, i2


def gate_profile(t: GridGraph, gate: Gate, other: Gate) -> list[int]:
    dy = axis_distances(t, other.nodes, horizontal=False)
    return [dy[v] for v in gate.nodes]


def _closest_along(g: GridGraph, run: list[int], anchor: int, cands: Iterable[int]) -> int | None:
    idx = {v: k for k, v in enumerate(run)}
    cands = [c for c in cands if c in idx]
    if not cands:
        return None
    a = idx[anchor]
    return min(cands, key=lambda c: (abs(idx[c] - a), idx[c]))


def _hsplit(vg: VirtualGraph, nodes: Iterable[int]) -> tuple[VirtualGraph, dict[int, int]]:
    vg = split_line(vg, nodes, vertical=False)
    return vg, dict(zip(vg.records[-1].nodes, vg.records[-1].created))


def _cut_free_side(vg: VirtualGraph, run: list[int], twin: dict[int, int], upper: bool, anchor: int, skip: set[int]) -> VirtualGraph:
    """Cut the chosen side of a split horizontal portal at its first free node.

    The chosen node has no vertical neighbour on that side; it is cut into a
    west and an east copy, the one closest to ``anchor`` along the portal.
    """
    g = vg.graph
    side_copy = {v: (twin[v] if upper else v) for v in run}
    free = [v for v in run if v not in skip and (N if upper else S) not in g.adj[side_copy[v]]]
    b = _closest_along(g, run, anchor, free)
    if b is None:
        return vg
    c = side_copy[b]
    if W in g.adj[c] and E in g.adj[c]:
        vg = split_node(vg, c, keep_first=(W,), vertical=False)
    return vg


def _split_descendants(vg: VirtualGraph, roots: set[int], vertical: bool) -> VirtualGraph:
    if not roots:
        return vg
    nodes = vg.descendants(roots)
    # only nodes reachable inside the line itself are cut
    return split_line(vg, nodes, vertical=vertical)


def split_tunnel(vg: VirtualGraph, reg: Region, t: GridGraph) -> tuple[VirtualGraph, str]:
    gates = sorted(reg.gates, key=lambda x: x.id)
    G, G2 = gates[0], gates[1]
    prof = gate_profile(t, G, G2)
    i1, i2 = _profile_shape(prof)
    if prof[i1] == 0:
        g_dn, g_up = G.nodes[i1], G.nodes[i2]
        prof2 = gate_profile(t, G2, G)
        j1, j2 = _profile_shape(prof2)
        h_dn, h_up = G2.nodes[j1], G2.nodes[j2]
        p_dn = straight_run(t, g_dn, False)
        p_up = straight_run(t, g_up, False)
        if set(p_dn) == set(p_up):
            vg, tw = _hsplit(vg, p_dn)
            vg = _cut_free_side(vg, p_up, tw, True, g_up, {g_up, h_up})
            vg = _cut_free_side(vg, p_dn, tw, False, g_dn, {g_dn, h_dn})
        else:
            vg, tw_up = _hsplit(vg, p_up)
            vg, tw_dn = _hsplit(vg, p_dn)
            vg = _cut_free_side(vg, p_up, tw_up, True, g_up, {g_up, h_up})
            vg = _cut_free_side(vg, p_dn, tw_dn, False, g_dn, {g_dn, h_dn})
        return vg, "a"
    g0 = G.nodes[i1]
    prof2 = gate_profile(t, G2, G)
    j1, _ = _profile_shape(prof2)
    g1 = G2.nodes[j1]
    # distances inside the unsplit tunnel define the two mid portals
    dxg = axis_distances(t, g0, True)
    dxh = axis_distances(t, g1, True)
    dyg = axis_distances(t, g0, False)
    dyh = axis_distances(t, g1, False)
    dx, dy = dxg[g1], dyg[g1]
    px = {v for v in t.pos if dxg[v] == -(-dx // 2) and dxh[v] == dx // 2}
    py = {v for v in t.pos if dyg[v] == -(-dy // 2) and dyh[v] == dy // 2}
    p = straight_run(t, g0, False)
    p2 = straight_run(t, g1, False)
    vg, tw = _hsplit(vg, p)
    vg, tw2 = _hsplit(vg, p2)
    # the inner part holds copies of both portals; find on which side of each it lies
    comp = _component_of_both(vg, set(p) | set(tw.values()), set(p2) | set(tw2.values()))
    up = any(tw[v] in comp for v in p) if comp else True
    up2 = any(tw2[v] in comp for v in p2) if comp else False
    vg = _cut_free_side(vg, p, tw, up, g0, {g0, g1})
    vg = _cut_free_side(vg, p2, tw2, up2, g1, {g0, g1})
    vg = _split_descendants(vg, px, True)
    vg = _split_descendants(vg, py, False)
    return vg, "b"


def _component_of_both(vg: VirtualGraph, a: set[int], b: set[int]) -> set[int]:
    g = vg.graph
    for comp in components(g, vg.descendants(a | b) | _reach(g, a)):
        cs = set(comp)
        if cs & a and cs & b:
            return cs
    return set()


def _reach(g: GridGraph, start: set[int]) -> set[int]:
    seen = set(start)
    stack = list(start)
    while stack:
        for u in g.adj[stack.pop()].values():
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def drop_covered_regions(g: GridGraph, regions: list[Region]) -> list[Region]:
    """Remove regions whose projected nodes all lie in one other region.

    Splitting at a line that has nothing on one side leaves a strip of
    copies that duplicates nodes of the neighbouring region; such strips
    carry no routing information.
    """
    proj = {r.id: frozenset(g.origin[v] for v in r.nodes) for r in regions}
    holders: dict[int, list[int]] = {}
    kept: list[int] = []
    for r in sorted(regions, key=lambda r: (-len(proj[r.id]), r.id)):
        p = proj[r.id]
        first = next(iter(p))
        if any(p <= proj[o] for o in holders.get(first, [])):
            continue
        kept.append(r.id)
        for v in p:
            holders.setdefault(v, []).append(r.id)
    keep = set(kept)
    return [r for r in regions if r.id in keep]


def convex_split(d: Decomposition, strict: bool = False, prune: bool = True) -> Decomposition:
    vg = d.vg
    sizes: dict[int, int] = {}
    notes = list(d.notes)
    cases: dict[int, str] = {}
    for reg in d.regions:
        if len(reg.gates) != 2:
            if len(reg.gates) > 2:
                notes.append(f"region {reg.id} has {len(reg.gates)} gates after stage two")
            continue
        t = d.region_graph(reg.id)
        before = vg
        try:
            vg, case = split_tunnel(vg, reg, t)
            cases[reg.id] = case
        except (ProfileNotUnimodal, NotOnPortal) as exc:
            if strict:
                raise
            notes.append(f"tunnel {reg.id} left unsplit: {exc}")
            vg = before
    regions = build_regions(vg)
    if prune:
        kept = drop_covered_regions(vg.graph, regions)
        if len(kept) < len(regions):
            notes.append(f"dropped {len(regions) - len(kept)} regions covered by other regions")
        regions = kept
    out = Decomposition(d.base, vg, regions, "convex", d.ledger, d.hole_count, notes=notes)
    # count the final regions that descend from each tunnel
    origin_region = {v: reg.id for reg in d.regions for v in reg.nodes}
    for r in out.regions:
        roots = set()
        for v in r.nodes:
            u = v
            while u not in origin_region:
                u = vg.parent[u]
            roots.add(origin_region[u])
        for rid in roots:
            sizes[rid] = sizes.get(rid, 0) + 1
    out.tunnel_sizes = {rid: sizes.get(rid, 0) for rid in cases}
    out.notes.extend(f"tunnel {rid}: case ({c})" for rid, c in sorted(cases.items()))
    _charge(d.ledger, "convex_decomposition", len(out.regions), d.base.n, 3)
    return out


def decompose(g: GridGraph, ledger: RoundLedger | None = None, strict: bool = False, prune: bool = True) -> Decomposition:
    """Run all three stages."""
    d1 = simple_decomposition(g, ledger)
    d2 = split_junctions(d1)
    return convex_split(d2, strict=strict, prune=prune)


# --- verification ----------------------------------------------------------


@dataclass
class DecompositionReport:
    regions: int
    holes: int
    violations: list[str]
    checked_pairs: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "regions": self.regions,
            "holes": self.holes,
            "violations": self.violations,
            "checked_pairs": self.checked_pairs,
            "ok": self.ok,
        }


def verify_decomposition(
    d: Decomposition,
    exhaustive_limit: int = 400,
    samples: int = 2000,
    seed: int = 0,
    convexity: bool = True,
) -> DecompositionReport:
    """Check simplicity and path-convexity of every region.

    Convexity is checked twice: on the split region itself (distances
    between copies must match distances between their originals) and on the
    subgraph of the original graph induced by the projected node set.
    """
    g0 = d.base
    rng = random.Random(seed)
    violations: list[str] = []
    pairs = 0
    cache: dict[int, dict[int, int]] = {}

    def dist_from(u: int) -> dict[int, int]:
        if u not in cache:
            if len(cache) > 4096:
                cache.clear()
            cache[u] = bfs(g0, u)
        return cache[u]

    covered: set[int] = set()
    for reg in d.regions:
        r = d.region_graph(reg.id)
        covered.update(g0_v for g0_v in (r.origin[v] for v in r.pos))
        holes = count_inner_holes(r)
        if holes:
            violations.append(f"region {reg.id}: {holes} inner holes")
        if not convexity:
            continue
        proj = sorted({r.origin[v] for v in r.pos})
        induced = g0.subgraph(proj)
        nodes = r.nodes()
        if len(nodes) <= exhaustive_limit:
            sources = nodes
            targets_of = lambda s: nodes
        else:
            sources = rng.sample(nodes, min(len(nodes), max(1, samples // 20)))
            targets_of = lambda s: rng.sample(nodes, min(len(nodes), 20))
        bad = 0
        for s in sources:
            dr = bfs(r, s)
            di = bfs(induced, r.origin[s])
            dg = dist_from(r.origin[s])
            for t in targets_of(s):
                pairs += 1
                want = dg[r.origin[t]]
                if dr.get(t) != want or di.get(r.origin[t]) != want:
                    bad += 1
                    if bad <= 3:
                        violations.append(
                            f"region {reg.id}: d_R({s},{t})={dr.get(t)} induced={di.get(r.origin[t])} d={want}"
                        )
        if bad > 3:
            violations.append(f"region {reg.id}: {bad} convexity violations in total")
    if covered != set(g0.pos):
        violations.append("regions do not cover the graph")
    return DecompositionReport(len(d.regions), d.hole_count, violations, pairs)
