"""Split graphs: grid graphs whose nodes may be cut into positional copies.

A split along a vertical line gives every node on the line a left copy
(keeping the west edge) and a right copy (keeping the east edge); both
copies keep the vertical edges to same-side copies.  A node split cuts a
single node into two copies that partition its edges.  The original graph
is never modified; every operation returns a new :class:`VirtualGraph`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import NotOnHoleBoundary, NotOnPortal
from .grid import DIRECTIONS, E, HORIZONTAL, N, OPPOSITE, S, VERTICAL, W, GridGraph, Point, components

# side tags written into GridGraph.tags
SIDE = {W: "left", E: "right", N: "top", S: "bottom"}


@dataclass(frozen=True)
class SplitRecord:
    kind: str  # "portal" or "node"
    orientation: str  # "v" or "h"
    nodes: tuple[int, ...]
    created: tuple[int, ...]


@dataclass
class VirtualGraph:
    graph: GridGraph
    next_id: int
    records: list[SplitRecord] = field(default_factory=list)
    parent: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_grid(cls, g: GridGraph) -> VirtualGraph:
        return cls(g.copy(), max(g.pos, default=-1) + 1)

    def copy(self) -> VirtualGraph:
        return VirtualGraph(self.graph.copy(), self.next_id, list(self.records), dict(self.parent))

    def project(self, v: int) -> int:
        return self.graph.origin[v]

    def descendants(self, roots: Iterable[int]) -> set[int]:
        """Current nodes that were created (transitively) from ``roots``."""
        roots = set(roots)
        out = set()
        for v in self.graph.pos:
            u = v
            while True:
                if u in roots:
                    out.add(v)
                    break
                if u not in self.parent:
                    break
                u = self.parent[u]
        return out

    def regions(self) -> list[list[int]]:
        return components(self.graph)

    def _new(self, like: int) -> int:
        g = self.graph
        v = self.next_id
        self.next_id += 1
        g.pos[v] = g.pos[like]
        g.origin[v] = g.origin[like]
        g.adj[v] = {}
        g.tags[v] = g.tags.get(like, ())
        self.parent[v] = like
        return v


def _tag(g: GridGraph, v: int, *tags: str) -> None:
    cur = g.tags.get(v, ())
    g.tags[v] = cur + tuple(t for t in tags if t not in cur)


def _relink(g: GridGraph, v: int, d: Point, u: int | None) -> None:
    if u is None:
        g.adj[v].pop(d, None)
    else:
        g.adj[v][d] = u
        g.adj[u][OPPOSITE[d]] = v


def straight_run(g: GridGraph, v: int, vertical: bool) -> list[int]:
    """Maximal vertical (or horizontal) run through ``v``, listed S->N (W->E)."""
    lo, hi = (S, N) if vertical else (W, E)
    start = v
    while lo in g.adj[start]:
        start = g.adj[start][lo]
    run = [start]
    while hi in g.adj[run[-1]]:
        run.append(g.adj[run[-1]][hi])
    return run


def split_line(vg: VirtualGraph, nodes: Iterable[int], vertical: bool) -> VirtualGraph:
    """Split at a set of nodes closed under the line's own direction.

    For a vertical line each node becomes (left, right); the left copy keeps
    the id.  For a horizontal line each node becomes (bottom, top) and the
    bottom copy keeps the id.
    """
    out = vg.copy()
    g = out.graph
    cut = set(nodes)
    along = VERTICAL if vertical else HORIZONTAL
    keep_a, keep_b = (W, E) if vertical else (S, N)
    for v in cut:
        if v not in g.pos:
            raise NotOnPortal(f"node {v} is not in the graph")
        for d in along:
            u = g.adj[v].get(d)
            if u is not None and u not in cut:
                raise NotOnPortal(f"split set is not closed at node {v}")
    twin = {v: out._new(v) for v in sorted(cut)}
    orient = "v" if vertical else "h"
    for v in sorted(cut):
        b = twin[v]
        old = dict(g.adj[v])
        # b takes the keep_b side; v keeps keep_a
        g.adj[v].pop(keep_b, None)
        if keep_b in old:
            _relink(g, b, keep_b, old[keep_b])
        for d in along:
            u = old.get(d)
            if u is not None:
                g.adj[b][d] = twin[u]
        _tag(g, v, SIDE[keep_a], orient)
        _tag(g, b, SIDE[keep_b], orient)
    out.records.append(SplitRecord("portal", orient, tuple(sorted(cut)), tuple(twin[v] for v in sorted(cut))))
    g._at = None
    return out


def split_portal(vg: VirtualGraph, v: int, vertical: bool = True) -> VirtualGraph:
    return split_line(vg, straight_run(vg.graph, v, vertical), vertical)


def split_node(vg: VirtualGraph, v: int, keep_first: Iterable[Point], vertical: bool = True) -> VirtualGraph:
    """Cut node ``v`` into two copies.

    The first copy keeps the id and the edges in ``keep_first``; the second
    takes the rest.  With ``vertical`` the cut separates north from south
    (tags top/bottom), otherwise west from east (tags left/right).
    """
    out = vg.copy()
    g = out.graph
    if v not in g.pos:
        raise NotOnHoleBoundary(f"node {v} is not in the graph")
    keep = set(keep_first)
    b = out._new(v)
    old = dict(g.adj[v])
    for d, u in old.items():
        if d not in keep:
            g.adj[v].pop(d)
            _relink(g, b, d, u)
    first, second = ("top", "bottom") if vertical else ("left", "right")
    _tag(g, v, first)
    _tag(g, b, second)
    out.records.append(SplitRecord("node", "v" if vertical else "h", (v,), (b,)))
    g._at = None
    return out


def region_graphs(vg: VirtualGraph) -> list[GridGraph]:
    return [vg.graph.subgraph(c) for c in vg.regions()]
