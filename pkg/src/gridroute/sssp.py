"""Exact distances on simple regions through the two portal trees.

In a region without inner holes the vertical portals form a tree once every
adjacent pair keeps a single crossing edge.  Distances in that tree (one per
horizontal crossing) give the horizontal part of every shortest path; the
horizontal portal tree gives the vertical part.  Their sum is the hop
distance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import NotATree, Unreachable
from .grid import DIRECTIONS, E, N, S, W, GridGraph, is_horizontal
from .hybrid import RoundLedger, ceil_log2
from .virtual import straight_run


@dataclass(frozen=True)
class PortalGraph:
    """Portals of one orientation and the crossing edge of each adjacent pair."""

    orientation: str  # "vertical" or "horizontal"
    portals: tuple[tuple[int, ...], ...]
    portal_of: dict[int, int]
    crossing: dict[tuple[int, int], tuple[int, int]]

    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.portals))}
        for a, b in self.crossing:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_tree(self) -> bool:
        if len(self.crossing) != len(self.portals) - 1:
            return False
        adj = self.neighbors()
        seen = {0}
        stack = [0]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.portals)


def portal_graph(r: GridGraph, vertical: bool) -> PortalGraph:
    runs: list[tuple[int, ...]] = []
    portal_of: dict[int, int] = {}
    lo = S if vertical else W
    for v in r.nodes():
        if lo in r.adj[v]:
            continue
        run = tuple(straight_run(r, v, vertical))
        for u in run:
            portal_of[u] = len(runs)
        runs.append(run)
    cross: dict[tuple[int, int], tuple[int, int]] = {}
    best: dict[tuple[int, int], tuple[int, int, int]] = {}
    d = E if vertical else N
    for v in r.nodes():
        u = r.adj[v].get(d)
        if u is None:
            continue
        a, b = portal_of[v], portal_of[u]
        key = (min(a, b), max(a, b))
        x, y = r.pos[v]
        # keep the bottommost (then leftmost) crossing edge
        rank = (y, x, v)
        if key not in best or rank < best[key]:
            best[key] = rank
            cross[key] = (v, u)
    return PortalGraph("vertical" if vertical else "horizontal", tuple(runs), portal_of, cross)


def build_portal_graphs(r: GridGraph) -> tuple[PortalGraph, PortalGraph]:
    pv = portal_graph(r, True)
    ph = portal_graph(r, False)
    for pg in (pv, ph):
        if not pg.is_tree():
            raise NotATree(f"{pg.orientation} portal graph has a cycle")
    return pv, ph


def _tree_dist(pg: PortalGraph, sources: Iterable[int]) -> dict[int, int]:
    adj = pg.neighbors()
    dist = {s: 0 for s in sources}
    q = deque(dist)
    while q:
        a = q.popleft()
        for b in adj[a]:
            if b not in dist:
                dist[b] = dist[a] + 1
                q.append(b)
    return dist


def tree_sssp(
    r: GridGraph,
    source: int,
    orientation: str = "vertical",
    ledger: RoundLedger | None = None,
    pg: PortalGraph | None = None,
) -> dict[int, int]:
    """Per node, the number of crossings between its portal and the source's.

    With vertical portals this is the horizontal distance d_x.
    """
    pg = pg or portal_graph(r, orientation == "vertical")
    pd = _tree_dist(pg, [pg.portal_of[source]])
    if ledger is not None:
        ledger.charge("tree_sssp", r.n, max(1, ceil_log2(r.n)))
    return {v: pd[pg.portal_of[v]] for v in r.pos}


@dataclass(frozen=True)
class SsspSolution:
    source: int
    d: dict[int, int]
    dx: dict[int, int]
    dy: dict[int, int]
    pred: dict[int, int | None]


def _pick(r: GridGraph, v: int, dist: dict[int, int]) -> int | None:
    """Neighbour one step closer: vertical moves first, then smaller id."""
    best = None
    for d in (N, S, E, W):
        u = r.adj[v].get(d)
        if u is not None and dist.get(u, -2) == dist[v] - 1:
            key = (is_horizontal(d), u)
            if best is None or key < best[0]:
                best = (key, u)
    return None if best is None else best[1]


def sssp(r: GridGraph, source: int, ledger: RoundLedger | None = None) -> SsspSolution:
    pv, ph = build_portal_graphs(r)
    dx = tree_sssp(r, source, "vertical", ledger, pv)
    dy = tree_sssp(r, source, "horizontal", ledger, ph)
    d = {v: dx[v] + dy[v] for v in r.pos}
    pred = {v: (None if v == source else _pick(r, v, d)) for v in r.pos}
    return SsspSolution(source, d, dx, dy, pred)


@dataclass(frozen=True)
class SpspSolution:
    target: frozenset[int]
    dist: dict[int, int]
    next_hop: dict[int, int | None]

    def entry(self, v: int) -> int:
        """Node of the target set reached by following next hops."""
        while self.next_hop[v] is not None:
            v = self.next_hop[v]
        return v

    def walk(self, v: int) -> list[int]:
        out = [v]
        while self.next_hop[out[-1]] is not None:
            out.append(self.next_hop[out[-1]])
        return out


def spsp(r: GridGraph, target: Iterable[int], ledger: RoundLedger | None = None) -> SpspSolution:
    """Distance of every node to a node set, with a shortest-path forest into it.

    Nodes of the set are merged into a single source (their mutual edges
    weigh zero), which makes this one breadth-first search.
    """
    tgt = frozenset(target)
    if not tgt:
        raise Unreachable("empty target set")
    dist = {t: 0 for t in tgt}
    q = deque(sorted(tgt))
    while q:
        v = q.popleft()
        for u in r.adj[v].values():
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    nxt = {v: (None if v in tgt else _pick(r, v, dist)) for v in dist}
    if ledger is not None:
        ledger.charge("spsp", r.n, max(1, ceil_log2(r.n)))
    return SpspSolution(tgt, dist, nxt)
