"""Grid graphs, holes, distance oracles and small path utilities.

Coordinates follow the usual convention: x grows east, y grows north.
Every node stores at most one neighbour per cardinal direction, which is
what lets split copies (see :mod:`gridroute.virtual`) share a position
without ambiguity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import Disconnected, DuplicatePoint, NonIncidentComposition, Unreachable

Point = tuple[int, int]

E: Point = (1, 0)
N: Point = (0, 1)
W: Point = (-1, 0)
S: Point = (0, -1)
DIRECTIONS: tuple[Point, ...] = (E, N, W, S)
HORIZONTAL: tuple[Point, ...] = (E, W)
VERTICAL: tuple[Point, ...] = (N, S)
OPPOSITE = {E: W, W: E, N: S, S: N}
DIRECTION_NAMES = {E: "east", N: "north", W: "west", S: "south"}

# the 8 surrounding offsets in counter-clockwise order starting east
RING8: tuple[Point, ...] = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def left_of(d: Point) -> Point:
    return (-d[1], d[0])


def right_of(d: Point) -> Point:
    return (d[1], -d[0])


def is_horizontal(d: Point) -> bool:
    return d[1] == 0


def add(p: Point, d: Point) -> Point:
    return (p[0] + d[0], p[1] + d[1])


@dataclass(frozen=True)
class GridNode:
    id: int
    pos: Point
    lineage: tuple[int, tuple[str, ...]] | None = None


class GridGraph:
    """A 4-neighbour graph on integer points.

    ``adj[v]`` maps a direction to the neighbour in that direction.  For
    plain grid graphs ``origin`` is the identity; for split graphs it maps a
    copy to the original node it was made from.
    """

    __slots__ = ("pos", "adj", "origin", "tags", "_at")

    def __init__(
        self,
        pos: dict[int, Point],
        adj: dict[int, dict[Point, int]],
        origin: dict[int, int] | None = None,
        tags: dict[int, tuple[str, ...]] | None = None,
    ) -> None:
        self.pos = pos
        self.adj = adj
        self.origin = origin if origin is not None else {v: v for v in pos}
        self.tags = tags if tags is not None else {}
        self._at: dict[Point, int] | None = None

    @property
    def n(self) -> int:
        return len(self.pos)

    def nodes(self) -> list[int]:
        return sorted(self.pos)

    def nbr(self, v: int, d: Point) -> int | None:
        return self.adj[v].get(d)

    def neighbors(self, v: int) -> list[int]:
        a = self.adj[v]
        return [a[d] for d in DIRECTIONS if d in a]

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in self.nodes():
            for d in (E, N):
                u = self.adj[v].get(d)
                if u is not None:
                    out.append((v, u))
        return out

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj.values()) // 2

    def node(self, v: int) -> GridNode:
        lineage = None
        if self.origin[v] != v or self.tags.get(v):
            lineage = (self.origin[v], self.tags.get(v, ()))
        return GridNode(v, self.pos[v], lineage)

    def is_virtual(self) -> bool:
        return any(o != v for v, o in self.origin.items())

    def at(self, p: Point) -> int | None:
        """Node at position ``p`` (only meaningful for graphs without copies)."""
        if self._at is None:
            self._at = {q: v for v, q in self.pos.items()}
        return self._at.get(p)

    def subgraph(self, vids: Iterable[int]) -> GridGraph:
        keep = set(vids)
        pos = {v: self.pos[v] for v in keep}
        adj = {v: {d: u for d, u in self.adj[v].items() if u in keep} for v in keep}
        origin = {v: self.origin[v] for v in keep}
        tags = {v: self.tags[v] for v in keep if v in self.tags}
        return GridGraph(pos, adj, origin, tags)

    def copy(self) -> GridGraph:
        return GridGraph(
            dict(self.pos),
            {v: dict(a) for v, a in self.adj.items()},
            dict(self.origin),
            dict(self.tags),
        )


def build_graph(points: Sequence[Sequence[int]]) -> GridGraph:
    """Build the grid graph on ``points``; node ids are list indices."""
    pos: dict[int, Point] = {}
    index: dict[Point, int] = {}
    for i, p in enumerate(points):
        q = (int(p[0]), int(p[1]))
        if q in index:
            raise DuplicatePoint(f"point {q} appears twice")
        index[q] = i
        pos[i] = q
    adj: dict[int, dict[Point, int]] = {i: {} for i in pos}
    for i, q in pos.items():
        for d in DIRECTIONS:
            j = index.get(add(q, d))
            if j is not None:
                adj[i][d] = j
    g = GridGraph(pos, adj)
    g._at = index
    if g.n and len(components(g)) != 1:
        raise Disconnected("grid graph is not connected")
    return g


def components(g: GridGraph, vids: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components, each sorted, listed by smallest member."""
    todo = set(g.pos if vids is None else vids)
    out = []
    for start in sorted(todo):
        if start not in todo:
            continue
        todo.discard(start)
        comp = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for u in g.adj[v].values():
                if u in todo:
                    todo.discard(u)
                    comp.append(u)
                    stack.append(u)
        out.append(sorted(comp))
    return out


# --- distances -------------------------------------------------------------


def bfs(g: GridGraph, sources: int | Iterable[int]) -> dict[int, int]:
    """Hop distances from a source node or a set of source nodes."""
    srcs = [sources] if isinstance(sources, int) else list(sources)
    dist = {s: 0 for s in srcs}
    queue = deque(srcs)
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for u in g.adj[v].values():
            if u not in dist:
                dist[u] = dv
                queue.append(u)
    return dist


def axis_distances(g: GridGraph, sources: int | Iterable[int], horizontal: bool) -> dict[int, int]:
    """0/1 search: edges along the chosen axis cost 1, the others cost 0.

    With ``horizontal=True`` this is the horizontal distance d_x.
    """
    srcs = [sources] if isinstance(sources, int) else list(sources)
    dist = {s: 0 for s in srcs}
    dq = deque(srcs)
    done: set[int] = set()
    while dq:
        v = dq.popleft()
        if v in done:
            continue
        done.add(v)
        for d, u in g.adj[v].items():
            w = 1 if is_horizontal(d) == horizontal else 0
            nd = dist[v] + w
            if nd < dist.get(u, 1 << 60):
                dist[u] = nd
                if w:
                    dq.append(u)
                else:
                    dq.appendleft(u)
    return dist


@dataclass(frozen=True)
class DistTriple:
    d: int
    d_x: int
    d_y: int


def dist_oracle(g: GridGraph, s: int, t: int) -> DistTriple:
    d = bfs(g, s)
    if t not in d:
        raise Unreachable(f"{t} not reachable from {s}")
    dx = axis_distances(g, s, horizontal=True)[t]
    dy = axis_distances(g, s, horizontal=False)[t]
    return DistTriple(d[t], dx, dy)


# --- holes -----------------------------------------------------------------


@dataclass(frozen=True)
class Hole:
    """A connected component of the plane minus filled cells and edges.

    ``boundary`` is the closed walk around the hole (first node is not
    repeated at the end) and ``slots`` the direction leaving each entry.
    ``cells`` lists the unfilled unit cells (by lower-left corner) inside a
    one-cell margin around the graph's bounding box.
    """

    id: int
    bounded: bool
    boundary: tuple[int, ...]
    slots: tuple[Point, ...]
    cells: frozenset[Point]


def cell_filled(points: set[Point] | dict[Point, int], c: Point) -> bool:
    x, y = c
    return (x, y) in points and (x + 1, y) in points and (x, y + 1) in points and (x + 1, y + 1) in points


def hole_cells(g: GridGraph) -> tuple[dict[Point, int], int]:
    """Label every unfilled cell near the graph with a component index.

    Returns the labelling and the index of the unbounded component.
    """
    pts = {p: v for v, p in g.pos.items()}
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs) - 1, max(xs), min(ys) - 1, max(ys)
    cells = [(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1) if not cell_filled(pts, (x, y))]
    free = set(cells)
    label: dict[Point, int] = {}
    count = 0
    for c in cells:
        if c in label:
            continue
        label[c] = count
        stack = [c]
        while stack:
            x, y = stack.pop()
            cand = []
            # side neighbours: connected iff the shared grid edge is absent
            if not ((x + 1, y) in pts and (x + 1, y + 1) in pts):
                cand.append((x + 1, y))
            if not ((x, y) in pts and (x, y + 1) in pts):
                cand.append((x - 1, y))
            if not ((x, y + 1) in pts and (x + 1, y + 1) in pts):
                cand.append((x, y + 1))
            if not ((x, y) in pts and (x + 1, y) in pts):
                cand.append((x, y - 1))
            # corner neighbours: connected iff the shared corner is absent
            for dx, dy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
                corner = (x + (1 if dx > 0 else 0), y + (1 if dy > 0 else 0))
                if corner not in pts:
                    cand.append((x + dx, y + dy))
            for q in cand:
                if q in free and q not in label:
                    label[q] = count
                    stack.append(q)
        count += 1
    return label, label[(x0, y0)]


def left_cell(p: Point, d: Point) -> Point:
    """The unit cell lying to the left of the directed edge p -> p + d."""
    x, y = p
    if d == E:
        return (x, y)
    if d == N:
        return (x - 1, y)
    if d == W:
        return (x - 1, y - 1)
    return (x, y - 1)


def face_walks(g: GridGraph) -> list[list[tuple[int, Point]]]:
    """All faces of the embedded graph as closed walks keeping the face on the left."""
    seen: set[tuple[int, Point]] = set()
    walks = []
    for v in g.nodes():
        for d in DIRECTIONS:
            if d not in g.adj[v] or (v, d) in seen:
                continue
            walk = []
            cur, cd = v, d
            while (cur, cd) not in seen:
                seen.add((cur, cd))
                walk.append((cur, cd))
                nxt = g.adj[cur][cd]
                for nd in (left_of(cd), cd, right_of(cd), OPPOSITE[cd]):
                    if nd in g.adj[nxt]:
                        cur, cd = nxt, nd
                        break
            walks.append(walk)
    return walks


def _canonical_rotation(walk: list[tuple[int, Point]]) -> list[tuple[int, Point]]:
    key = min(range(len(walk)), key=lambda i: (walk[i][0], DIRECTIONS.index(walk[i][1])))
    return walk[key:] + walk[:key]


def detect_holes(g: GridGraph) -> list[Hole]:
    """All holes of a plain grid graph; the unbounded one is listed last."""
    if g.is_virtual():
        raise ValueError("hole detection needs a graph without copies")
    label, outer = hole_cells(g)
    pts = {p: v for v, p in g.pos.items()}
    by_label: dict[int, set[Point]] = {}
    for c, lab in label.items():
        by_label.setdefault(lab, set()).add(c)
    walks_of: dict[int, list[tuple[int, Point]]] = {}
    for walk in face_walks(g):
        v, d = walk[0]
        c = left_cell(g.pos[v], d)
        if cell_filled(pts, c):
            continue
        walks_of[label[c]] = _canonical_rotation(walk)
    ids = hole_id_map(g, label)
    holes = []
    for lab in sorted(by_label, key=lambda k: (k == outer, ids.get(k, 0))):
        walk = walks_of.get(lab)
        if walk is None:
            # single-node graph: the outer face has no edges
            boundary: tuple[int, ...] = tuple(g.nodes())
            slots: tuple[Point, ...] = ()
        else:
            boundary = tuple(v for v, _ in walk)
            slots = tuple(d for _, d in walk)
        holes.append(Hole(ids[lab], lab != outer, boundary, slots, frozenset(by_label[lab])))
    return holes


def east_incident(g: GridGraph, label: dict[Point, int]) -> dict[int, list[int]]:
    """Nodes whose northern point is missing, grouped by the hole containing that point."""
    out: dict[int, list[int]] = {}
    for v, (x, y) in g.pos.items():
        if g.at((x, y + 1)) is None:
            # the cell with lower-left corner (x, y) has the missing point as a corner
            out.setdefault(label[(x, y)], []).append(v)
    return out


def hole_id_map(g: GridGraph, label: dict[Point, int]) -> dict[int, int]:
    return {lab: min(vs) for lab, vs in east_incident(g, label).items()}


def inner_holes(g: GridGraph) -> list[Hole]:
    return [h for h in detect_holes(g) if h.bounded]


def filled_cells(g: GridGraph) -> int:
    """Number of unit squares whose four sides are edges of ``g`` (copies allowed)."""
    count = 0
    for a in g.pos:
        b = g.adj[a].get(E)
        if b is None:
            continue
        c = g.adj[b].get(N)
        if c is None:
            continue
        d = g.adj[c].get(W)
        if d is not None and g.adj[d].get(S) == a:
            count += 1
    return count


def count_inner_holes(g: GridGraph) -> int:
    """Inner holes via Euler's formula; works on split graphs too.

    Bounded faces of a plane graph number E - V + C; every bounded face
    that is not a filled unit square is an inner hole.
    """
    if not g.pos:
        return 0
    return g.num_edges() - g.n + len(components(g)) - filled_cells(g)


def hole_boundary(g: GridGraph, hole: Hole) -> tuple[int, ...]:
    return hole.boundary


def ring_runs(g: GridGraph, v: int) -> list[tuple[tuple[Point, ...], Point, Point]]:
    """Maximal runs of missing points on the 8-cycle around ``v``.

    Each entry is (run offsets, left present offset, right present offset)
    in counter-clockwise order.  Empty when no surrounding point is missing
    or when all eight are missing.
    """
    x, y = g.pos[v]
    present = [g.at((x + dx, y + dy)) is not None for dx, dy in RING8]
    if all(present) or not any(present):
        return []
    start = next(i for i in range(8) if present[i])
    runs = []
    i = start + 1
    while i < start + 9:
        if not present[i % 8]:
            j = i
            while not present[j % 8]:
                j += 1
            run = tuple(RING8[k % 8] for k in range(i, j))
            runs.append((run, RING8[(i - 1) % 8], RING8[j % 8]))
            i = j
        else:
            i += 1
    return runs


def ring_step(g: GridGraph, v: int, offset: Point, run: Sequence[Point]) -> int | None:
    """First node on a shortest path from ``v`` to the present ring point ``offset``.

    Diagonal targets are reached through the orthogonal point that is not
    part of the missing run.
    """
    x, y = g.pos[v]
    dx, dy = offset
    if dx == 0 or dy == 0:
        return g.at((x + dx, y + dy))
    for step in ((dx, 0), (0, dy)):
        if step not in run:
            u = g.at((x + step[0], y + step[1]))
            if u is not None:
                return u
    return None


# --- paths -----------------------------------------------------------------


@dataclass(frozen=True)
class GridPath:
    nodes: tuple[int, ...]
    steps: tuple[Point, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def x_hops(self) -> int:
        return sum(1 for d in self.steps if is_horizontal(d))

    @property
    def y_hops(self) -> int:
        return self.length - self.x_hops


def path_from_nodes(g: GridGraph, nodes: Sequence[int]) -> GridPath:
    steps = []
    for a, b in zip(nodes, nodes[1:]):
        for d, u in g.adj[a].items():
            if u == b:
                steps.append(d)
                break
        else:
            raise NonIncidentComposition(f"{a} and {b} are not adjacent")
    return GridPath(tuple(nodes), tuple(steps))


def path_from_steps(g: GridGraph, start: int, steps: Sequence[Point]) -> GridPath:
    nodes = [start]
    for d in steps:
        u = g.adj[nodes[-1]].get(d)
        if u is None:
            raise NonIncidentComposition(f"no {DIRECTION_NAMES[d]} edge at {nodes[-1]}")
        nodes.append(u)
    return GridPath(tuple(nodes), tuple(steps))


def is_monotonous(path: GridPath | Sequence[Point]) -> bool:
    steps = path.steps if isinstance(path, GridPath) else tuple(path)
    used = set(steps)
    return not ((E in used and W in used) or (N in used and S in used))


def compose(p: GridPath, q: GridPath) -> GridPath:
    if p.nodes[-1] != q.nodes[0]:
        raise NonIncidentComposition("paths do not meet")
    return GridPath(p.nodes + q.nodes[1:], p.steps + q.steps)


def check_even_cycles(g: GridGraph) -> bool:
    """True iff every cycle has even length, i.e. the graph is 2-colourable."""
    colour: dict[int, int] = {}
    for s in g.nodes():
        if s in colour:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.adj[v].values():
                if u not in colour:
                    colour[u] = 1 - colour[v]
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return False
    return True


def check_neighbor_distances(g: GridGraph, w: int) -> bool:
    d = bfs(g, w)
    return all(abs(d[v] - d[u]) == 1 for v in g.pos for u in g.adj[v].values())
