"""Unit disk graph front end: generation, grid abstraction and route lifting.

The grid abstraction is a snapping heuristic.  A grid node sits at every
integer point with some disk node within distance 1/2, and the nearest such
node represents it.  Whether the result is usable is checked per instance
rather than guaranteed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import GenerationFailed
from .grid import GridGraph, GridPath, Point, components, DIRECTIONS, add

STRETCH_BOUND = 36


@dataclass
class Udg:
    points: list[tuple[float, float]]
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.edges:
            self.edges = unit_disk_edges(self.points)
        self.adj: dict[int, list[int]] = {i: [] for i in range(len(self.points))}
        for a, b in self.edges:
            self.adj[a].append(b)
            self.adj[b].append(a)

    @property
    def n(self) -> int:
        return len(self.points)

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.bfs(0)) == self.n

    def bfs(self, s: int, limit: int | None = None) -> dict[int, int]:
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            if limit is not None and dist[v] >= limit:
                continue
            for u in self.adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    q.append(u)
        return dist

    def shortest_path(self, s: int, t: int) -> list[int]:
        prev = {s: s}
        q = deque([s])
        while q:
            v = q.popleft()
            if v == t:
                break
            for u in sorted(self.adj[v]):
                if u not in prev:
                    prev[u] = v
                    q.append(u)
        if t not in prev:
            return []
        out = [t]
        while out[-1] != s:
            out.append(prev[out[-1]])
        return out[::-1]

    def to_json(self) -> dict:
        return {"points": [[x, y] for x, y in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> Udg:
        return cls([(float(x), float(y)) for x, y in data["points"]])


def _cell(p: tuple[float, float]) -> tuple[int, int]:
    return math.floor(p[0]), math.floor(p[1])


def unit_disk_edges(points: Sequence[tuple[float, float]]) -> list[tuple[int, int]]:
    """All pairs at Euclidean distance at most 1 (exact comparison)."""
    buckets: dict[tuple[int, int], list[int]] = {}
    for i, p in enumerate(points):
        buckets.setdefault(_cell(p), []).append(i)
    out = []
    for i, (x, y) in enumerate(points):
        cx, cy = _cell((x, y))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in buckets.get((cx + dx, cy + dy), ()):
                    if j > i and (points[j][0] - x) ** 2 + (points[j][1] - y) ** 2 <= 1:
                        out.append((i, j))
    return sorted(out)


def random_udg(n: int, area: float | None = None, seed: int = 0, max_tries: int = 200) -> Udg:
    """Uniform points in a square of the given area, redrawn until connected."""
    if n < 1:
        raise GenerationFailed("n must be positive")
    area = area if area is not None else n / 2.5
    if area <= 0:
        raise GenerationFailed("area must be positive")
    side = math.sqrt(area)
    rng = random.Random(seed)
    for _ in range(max_tries):
        pts = [(round(rng.uniform(0, side), 6), round(rng.uniform(0, side), 6)) for _ in range(n)]
        u = Udg(pts)
        if u.is_connected():
            return u
    raise GenerationFailed(f"no connected unit disk graph after {max_tries} draws")


# --- grid abstraction ------------------------------------------------------


@dataclass
class Abstraction:
    grid: GridGraph | None
    points: list[Point]
    rep: dict[int, int]  # grid node -> representative disk node
    attach: dict[int, int]  # disk node -> grid node whose representative is within one hop
    rep_within_one: bool
    every_node_attached: bool
    connected: bool
    link_hops: int  # worst disk distance between representatives of adjacent grid nodes

    @property
    def passes(self) -> bool:
        return self.rep_within_one and self.every_node_attached and self.connected

    def report(self) -> dict:
        return {
            "grid_nodes": len(self.points),
            "rep_within_one": self.rep_within_one,
            "every_node_attached": self.every_node_attached,
            "connected": self.connected,
            "link_hops": self.link_hops,
            "passes": self.passes,
        }


def grid_abstraction(u: Udg) -> Abstraction:
    best: dict[Point, tuple[float, int]] = {}
    for i, (x, y) in enumerate(u.points):
        for gx in range(math.floor(x - 0.5), math.ceil(x + 0.5) + 1):
            for gy in range(math.floor(y - 0.5), math.ceil(y + 0.5) + 1):
                d2 = (gx - x) ** 2 + (gy - y) ** 2
                if d2 <= 0.25:
                    key = (d2, i)
                    if (gx, gy) not in best or key < best[(gx, gy)]:
                        best[(gx, gy)] = key
    points = sorted(best, key=lambda p: (p[1], p[0]))
    rep = {k: best[p][1] for k, p in enumerate(points)}
    rep_ok = all(
        math.dist(u.points[rep[k]], p) <= 1 for k, p in enumerate(points)
    )
    reps_of: dict[int, list[int]] = {}
    for k, r in rep.items():
        reps_of.setdefault(r, []).append(k)
    attach: dict[int, int] = {}
    for v in range(u.n):
        near = [(0, v)] + [(1, w) for w in sorted(u.adj[v])]
        for hop, w in near:
            if w in reps_of:
                cands = reps_of[w]
                attach[v] = min(cands, key=lambda k: (math.dist(u.points[v], points[k]), k))
                break
    grid = None
    connected = False
    link = 0
    if points:
        grid = _grid(points)
        connected = len(components(grid)) == 1
        for a, b in grid.edges():
            ra, rb = rep[a], rep[b]
            if ra != rb:
                link = max(link, u.bfs(ra, limit=8).get(rb, 9))
    return Abstraction(grid, points, rep, attach, rep_ok, len(attach) == u.n, connected, link)


def _grid(points: list[Point]) -> GridGraph:
    # build without the connectivity check; the caller reports it
    index = {p: i for i, p in enumerate(points)}
    pos = dict(enumerate(points))
    adj = {i: {} for i in pos}
    for i, p in pos.items():
        for d in DIRECTIONS:
            j = index.get(add(p, d))
            if j is not None:
                adj[i][d] = j
    return GridGraph(pos, adj)


def lift_route(u: Udg, ab: Abstraction, s: int, t: int, route: GridPath | Sequence[int]) -> list[int]:
    """Disk-graph walk from s to t that follows the representatives of a grid route."""
    if s == t:
        return [s]
    if t in u.adj[s]:
        return [s, t]
    nodes = route.nodes if isinstance(route, GridPath) else tuple(route)
    chain = [s] + [ab.rep[g] for g in nodes] + [t]
    walk = [s]
    for a, b in zip(chain, chain[1:]):
        if a == b:
            continue
        if b in u.adj[a]:
            walk.append(b)
        else:
            walk.extend(u.shortest_path(a, b)[1:])
    return _drop_loops(walk)


def _drop_loops(walk: list[int]) -> list[int]:
    out: list[int] = []
    seen: dict[int, int] = {}
    for v in walk:
        if v in seen:
            del out[seen[v] + 1 :]
            seen = {w: i for i, w in enumerate(out)}
        else:
            seen[v] = len(out)
            out.append(v)
    return out


@dataclass(frozen=True)
class StretchRow:
    s: int
    t: int
    lifted: int
    dist: int

    @property
    def stretch(self) -> float:
        return self.lifted / self.dist if self.dist else 1.0


def stretch_report(u: Udg, ab: Abstraction, router, pairs: Iterable[tuple[int, int]]) -> list[StretchRow]:
    """Route every pair on the grid, lift it and compare with the disk-graph distance."""
    rows = []
    cache: dict[int, dict[int, int]] = {}
    for s, t in pairs:
        if s not in cache:
            cache[s] = u.bfs(s)
        gs, gt = ab.attach[s], ab.attach[t]
        walk = lift_route(u, ab, s, t, router.route(gs, gt))
        rows.append(StretchRow(s, t, len(walk) - 1, cache[s][t]))
    return rows


def stretch_csv(rows: Iterable[StretchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "t", "lifted", "dist", "stretch"])
    for r in rows:
        w.writerow([r.s, r.t, r.lifted, r.dist, f"{r.stretch:.4f}"])
    return buf.getvalue()


def is_walk(u: Udg, walk: Sequence[int]) -> bool:
    return all(b in u.adj[a] for a, b in zip(walk, walk[1:]))


def load_udg(path: str) -> Udg:
    with open(path) as fh:
        return Udg.from_json(json.load(fh))
