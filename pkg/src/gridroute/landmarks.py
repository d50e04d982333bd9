"""Landmarks on gates and the weighted landmark graph between them."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .decomposition import Decomposition, Gate, Region
from .errors import ClosestPointNotLandmark, NoPath
from .grid import GridGraph, bfs
from .hybrid import RoundLedger, ceil_log2
from .sssp import SpspSolution, spsp
from .virtual import straight_run

KINDS = ("endpoint", "overhang", "projected", "closure")


class RegionIndex:
    """Lookups shared by landmark, label and routing code."""

    def __init__(self, d: Decomposition):
        self.d = d
        self.base = d.base
        self.regions: dict[int, Region] = {r.id: r for r in d.regions}
        self.copy_in: dict[int, dict[int, int]] = {}
        for r in d.regions:
            m = {}
            for v in r.nodes:
                o = d.graph.origin[v]
                # path-convex regions hold at most one copy of a node
                m.setdefault(o, v)
            self.copy_in[r.id] = m
        self.regions_of: dict[int, list[int]] = d.regions_of()
        self.gate_by_id: dict[int, Gate] = {g.id: g for r in d.regions for g in r.gates}
        self._spsp: dict[int, SpspSolution] = {}
        self._proj: dict[int, frozenset[int]] = {}
        self._cross: dict[tuple[int, int], SpspSolution | None] = {}

    def graph(self, rid: int) -> GridGraph:
        return self.d.region_graph(rid)

    def origin(self, v: int) -> int:
        return self.d.graph.origin[v]

    def projected(self, rid: int) -> frozenset[int]:
        if rid not in self._proj:
            self._proj[rid] = frozenset(self.copy_in[rid])
        return self._proj[rid]

    def home(self, v: int) -> int:
        return self.regions_of[v][0]

    def gate_spsp(self, gate: Gate, ledger: RoundLedger | None = None) -> SpspSolution:
        if gate.id not in self._spsp:
            self._spsp[gate.id] = spsp(self.graph(gate.region), gate.nodes, ledger)
        return self._spsp[gate.id]

    def crossing(self, a: int, b: int) -> SpspSolution | None:
        """Shortest paths inside region ``a`` to the nodes it shares with ``b``."""
        key = (a, b)
        if key not in self._cross:
            shared = self.projected(a) & self.projected(b)
            self._cross[key] = (
                spsp(self.graph(a), [self.copy_in[a][o] for o in shared]) if shared else None
            )
        return self._cross[key]

    def closest_on_gate(self, gate: Gate, vid: int) -> tuple[int, int]:
        """(closest gate node, distance) for a node of the gate's region."""
        sol = self.gate_spsp(gate)
        return sol.entry(vid), sol.dist[vid]


@dataclass(frozen=True)
class Landmark:
    node: int
    kind: str
    gates: tuple[int, ...]


@dataclass(frozen=True)
class LEdge:
    u: int
    v: int
    w: int
    regions: frozenset[int]
    rule: str

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass
class LandmarkGraph:
    landmarks: dict[int, Landmark]
    edges: dict[tuple[int, int], LEdge] = field(default_factory=dict)
    closure_added: int = 0

    @property
    def adj(self) -> dict[int, dict[int, LEdge]]:
        if getattr(self, "_adj", None) is None or self._adj_n != len(self.edges):
            a: dict[int, dict[int, LEdge]] = {v: {} for v in self.landmarks}
            for e in self.edges.values():
                a[e.u][e.v] = e
                a[e.v][e.u] = e
            self._adj, self._adj_n = a, len(self.edges)
        return self._adj

    def add_edge(self, u: int, v: int, w: int, regions: Iterable[int], rule: str) -> None:
        if u == v:
            return
        key = (min(u, v), max(u, v))
        regs = frozenset(regions)
        old = self.edges.get(key)
        if old is None or w < old.w:
            self.edges[key] = LEdge(key[0], key[1], w, regs, rule)
        elif w == old.w:
            rule = old.rule if old.rule == rule else "i+ii"
            self.edges[key] = LEdge(key[0], key[1], w, old.regions | regs, rule)

    def remove_edge(self, u: int, v: int) -> None:
        self.edges.pop((min(u, v), max(u, v)), None)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj.values()), default=0)

    def to_json(self) -> dict:
        return {
            "landmarks": [
                {"id": l.node, "kind": l.kind, "gates": list(l.gates)} for l in sorted(self.landmarks.values(), key=lambda l: l.node)
            ],
            "edges": [
                {"u": e.u, "v": e.v, "w": e.w, "regions": sorted(e.regions), "rule": e.rule}
                for _, e in sorted(self.edges.items())
            ],
        }


# --- marking ---------------------------------------------------------------


def _overhang(r: GridGraph, reg: Region, gate: Gate, v: int) -> bool:
    run = straight_run(r, v, gate.orientation == "h")
    ends = {run[0], run[-1]} - {v} or {v}
    wall_sets = [set(w.nodes) for w in reg.walls]
    other_gate_nodes = {u for g in reg.gates if g.id != gate.id for u in g.nodes}
    # the overhang sits strictly inside the run
    inner = set(run[1:-1])
    for ws in wall_sets:
        if not ws.intersection(inner):
            continue
        for u in ends:
            if u in ws or u in other_gate_nodes:
                return True
    return False


def mark_landmarks(idx: RegionIndex, ledger: RoundLedger | None = None) -> dict[int, Landmark]:
    """Endpoint, overhang-induced and projected landmarks, keyed by original node."""
    kind: dict[int, str] = {}
    gates_of: dict[int, set[int]] = {}
    rank = {k: i for i, k in enumerate(KINDS)}

    def put(o: int, k: str, gid: int) -> None:
        if o not in kind or rank[k] < rank[kind[o]]:
            kind[o] = k
        gates_of.setdefault(o, set()).add(gid)

    gate_members: list[tuple[Gate, int]] = []
    for reg in idx.d.regions:
        r = idx.graph(reg.id)
        for gate in reg.gates:
            for i, v in enumerate(gate.nodes):
                o = idx.origin(v)
                gate_members.append((gate, o))
                if i == 0 or i == len(gate.nodes) - 1:
                    put(o, "endpoint", gate.id)
                elif _overhang(r, reg, gate, v):
                    put(o, "overhang", gate.id)
    primary = set(kind)
    base = idx.base
    for gate, o in gate_members:
        if o in primary:
            gates_of[o].add(gate.id)
            continue
        line = straight_run(base, o, gate.orientation == "h")
        if primary.intersection(line):
            put(o, "projected", gate.id)
    for gate, o in gate_members:
        if o in kind:
            gates_of[o].add(gate.id)
    if ledger is not None:
        ledger.charge("landmarks", len(kind), max(1, ceil_log2(base.n)))
    return {o: Landmark(o, kind[o], tuple(sorted(gates_of[o]))) for o in sorted(kind)}


# --- landmark graph --------------------------------------------------------


def _gate_offsets(idx: RegionIndex, gate: Gate) -> list[int]:
    return [idx.origin(v) for v in gate.nodes]


def _chain_labels(idx: RegionIndex, a: int, b: int, orientation: str) -> set[int]:
    out = set()
    for rid in set(idx.regions_of[a]) & set(idx.regions_of[b]):
        for g in idx.regions[rid].gates:
            if g.orientation != orientation:
                continue
            proj = {idx.origin(v) for v in g.nodes}
            if a in proj and b in proj:
                out.add(rid)
    return out


def build_landmark_graph(
    idx: RegionIndex,
    landmarks: dict[int, Landmark],
    strict: bool = False,
    ledger: RoundLedger | None = None,
) -> LandmarkGraph:
    """Connect landmarks along gates and to closest points on other gates.

    A closest point that is not yet a landmark raises in strict mode;
    otherwise it is added as a landmark and the construction repeats.
    """
    marks = dict(landmarks)
    added = 0
    while True:
        lg = LandmarkGraph(marks)
        missing: dict[int, int] = {}
        for reg in idx.d.regions:
            for gate in reg.gates:
                proj = _gate_offsets(idx, gate)
                pts = [i for i, o in enumerate(proj) if o in marks]
                for i, j in zip(pts, pts[1:]):
                    a, b = proj[i], proj[j]
                    lg.add_edge(a, b, j - i, _chain_labels(idx, a, b, gate.orientation) or {reg.id}, "i")
            for g1 in reg.gates:
                for v in g1.nodes:
                    o = idx.origin(v)
                    if o not in marks:
                        continue
                    for g2 in reg.gates:
                        if g2.id == g1.id:
                            continue
                        c, dist = idx.closest_on_gate(g2, v)
                        oc = idx.origin(c)
                        if oc == o:
                            continue
                        if oc not in marks:
                            if strict:
                                raise ClosestPointNotLandmark(f"closest point {oc} of landmark {o} on gate {g2.id}")
                            missing.setdefault(oc, g2.id)
                            continue
                        lg.add_edge(o, oc, dist, {reg.id}, "ii")
        if not missing:
            break
        for oc, gid in missing.items():
            gates = tuple(sorted(g for g in _gates_of_node(idx, oc)))
            marks[oc] = Landmark(oc, "closure", gates)
            added += 1
    lg.closure_added = added
    if ledger is not None:
        gates = sum(len(r.gates) for r in idx.d.regions)
        ledger.charge("landmark_graph", len(lg.edges), max(1, ceil_log2(idx.base.n)) * max(1, max((len(r.gates) for r in idx.d.regions), default=1)))
    return lg


def _gates_of_node(idx: RegionIndex, o: int) -> set[int]:
    out = set()
    for rid in idx.regions_of[o]:
        v = idx.copy_in[rid][o]
        for g in idx.regions[rid].gates:
            if v in g.nodes:
                out.add(g.id)
    return out


# --- landmark paths --------------------------------------------------------


@dataclass(frozen=True)
class LandmarkPath:
    s: int
    t: int
    landmarks: tuple[int, ...]
    length: int
    regions: tuple[int, ...]


def attachments(idx: RegionIndex, marks: dict[int, Landmark], v: int, rid: int | None = None) -> list[tuple[int, int]]:
    """Important landmarks of ``v``: per gate of its region, the nearest
    landmark on each side of the closest gate point, with exact distances."""
    out: dict[int, int] = {}
    rids = [rid] if rid is not None else [idx.home(v)]
    for r in rids:
        vid = idx.copy_in[r][v]
        for gate in idx.regions[r].gates:
            c, dist = idx.closest_on_gate(gate, vid)
            proj = _gate_offsets(idx, gate)
            k = gate.nodes.index(c)
            # at or below the closest point, then strictly above it
            for step, j in ((-1, k), (1, k + 1)):
                while 0 <= j < len(proj):
                    if proj[j] in marks:
                        d = dist + abs(j - k)
                        if d < out.get(proj[j], 1 << 60):
                            out[proj[j]] = d
                        break
                    j += step
    return sorted(out.items())


def landmark_shortest_path(
    lg: LandmarkGraph,
    s_att: Sequence[tuple[int, int]],
    t_att: Sequence[tuple[int, int]],
    s: int = -1,
    t: int = -2,
) -> tuple[tuple[int, ...], int]:
    """Shortest s->t path through the landmark graph.

    Ties break by (length, hop count, landmark id sequence).
    """
    if not s_att or not t_att:
        raise NoPath("source or target has no landmark attachment")
    t_map = dict(t_att)
    heap: list[tuple[int, int, tuple[int, ...]]] = []
    best: dict[int, tuple[int, int, tuple[int, ...]]] = {}
    for l, d in s_att:
        key = (d, 1, (l,))
        if l not in best or key < best[l]:
            best[l] = key
            heapq.heappush(heap, key)
    done: set[int] = set()
    result = None
    adj = lg.adj
    while heap:
        d, h, seq = heapq.heappop(heap)
        u = seq[-1]
        if u in done or best.get(u) != (d, h, seq):
            continue
        done.add(u)
        if u in t_map:
            cand = (d + t_map[u], h + 1, seq)
            if result is None or cand < result:
                result = cand
        if result is not None and d > result[0]:
            break
        for x, e in adj.get(u, {}).items():
            if x in done:
                continue
            key = (d + e.w, h + 1, seq + (x,))
            if x not in best or key < best[x]:
                best[x] = key
                heapq.heappush(heap, key)
    if result is None:
        raise NoPath(f"no landmark path from {s} to {t}")
    return result[2], result[0]


@dataclass(frozen=True)
class Move:
    """One region change of a landmark path: leave ``src`` for ``dst``.

    ``dist`` is the distance from the position before the move to the
    closest node shared by both regions, ``entry`` that node.
    """

    src: int
    dst: int
    dist: int
    entry: int


def region_moves(
    idx: RegionIndex,
    lg: LandmarkGraph,
    s: int,
    t: int,
    seq: Sequence[int],
    start: int | None = None,
    lookahead: bool = True,
) -> list[Move]:
    """Region changes along a landmark path.

    The path is a list of steps: reach the first landmark, follow each
    landmark-graph edge, reach t.  Each step has a set of admissible
    regions (those holding the landmark or t, or the edge labels).  The
    current region is kept while it is admissible.  Otherwise the walk moves
    to the admissible region whose shared nodes with the current region are
    closest to the last landmark reached, then closest to the walker (the
    position closest-point routing has reached).  Remaining ties go to the
    region whose completed walk is shortest, then to the one that stays
    admissible for the most following steps, then to the smaller id.  The
    walker advances to the closest shared node, the landmark position also
    to every landmark reached inside the region.  An admissible region
    sharing no node with the current one is reached through one bridging
    region.
    """
    steps: list[tuple[frozenset[int], int | None]] = []
    if seq:
        steps.append((frozenset(idx.regions_of[seq[0]]), seq[0]))
    for a, b in zip(seq, seq[1:]):
        steps.append((lg.edges[(min(a, b), max(a, b))].regions, b))
    steps.append((frozenset(idx.regions_of[t]), None))
    cur = idx.home(s) if start is None else start
    return _Walk(idx, steps, t, lookahead).run(cur, s, s, 0, None)[0]


class _Walk:
    """Closest-point walk through the admissible regions of each step."""

    def __init__(self, idx: RegionIndex, steps: list[tuple[frozenset[int], int | None]], t: int, lookahead: bool):
        self.idx = idx
        self.steps = steps
        self.t = t
        self.lookahead = lookahead

    def span(self, r: int, i: int) -> int:
        k = i + 1
        while k < len(self.steps) and r in self.steps[k][0]:
            k += 1
        return k - i - 1

    def option(self, cur: int, pos: int, walker: int, r: int) -> tuple[int, int, int, int] | None:
        sol = self.idx.crossing(cur, r)
        if sol is None:
            return None
        w = self.idx.copy_in[cur][walker]
        return sol.dist[self.idx.copy_in[cur][pos]], sol.dist[w], r, self.idx.origin(sol.entry(w))

    def pick(self, options, cur, pos, walker, i):
        best = min(o[:2] for o in options)
        tied = [o for o in options if o[:2] == best]
        if len(tied) == 1:
            return tied[0]

        # the simulated walks break their own ties greedily
        greedy = _Walk(self.idx, self.steps, self.t, False)

        def key(o):
            cost = greedy.run(cur, pos, walker, i, o)[1] if self.lookahead else 0
            return cost, -self.span(o[2], i), o[2]

        return min(tied, key=key)

    def run(self, cur: int, pos: int, walker: int, i0: int, first) -> tuple[list[Move], int]:
        """Moves from step ``i0`` on, optionally forcing the first choice; also the walk length."""
        idx = self.idx
        moves: list[Move] = []
        length = 0
        forced = first
        for i in range(i0, len(self.steps)):
            labels, landmark = self.steps[i]
            guard = 0
            while cur not in labels:
                guard += 1
                if guard > 2:
                    raise NoPath(f"no region links {cur} to {sorted(labels)}")
                options = [o for o in (self.option(cur, pos, walker, r) for r in sorted(labels)) if o is not None]
                if not options:
                    options = [
                        o
                        for o in (self.option(cur, pos, walker, r) for r in sorted(idx.regions))
                        if o is not None and any(idx.projected(o[2]) & idx.projected(x) for x in labels)
                    ]
                    if not options:
                        raise NoPath(f"no region links {cur} to {sorted(labels)}")
                o = forced if forced is not None else self.pick(options, cur, pos, walker, i)
                forced = None
                d, r, entry = o[1], o[2], o[3]
                moves.append(Move(cur, r, d, entry))
                length += d
                cur, pos, walker = r, entry, entry
            if landmark is not None and landmark in idx.projected(cur):
                pos = landmark
        r = idx.graph(cur)
        length += bfs(r, idx.copy_in[cur][walker]).get(idx.copy_in[cur][self.t], 1 << 30)
        return moves, length


def region_sequence(
    idx: RegionIndex, lg: LandmarkGraph, s: int, t: int, seq: Sequence[int], start: int | None = None
) -> tuple[int, ...]:
    """Regions visited by a landmark path, in order (see :func:`region_moves`)."""
    first = idx.home(s) if start is None else start
    moves = region_moves(idx, lg, s, t, seq, start=first)
    return (first,) + tuple(m.dst for m in moves)


def landmark_path(idx: RegionIndex, lg: LandmarkGraph, s: int, t: int) -> LandmarkPath:
    """Shortest landmark path, starting in whichever region of ``s`` gives the best one."""
    ta = attachments(idx, lg.landmarks, t)
    best = None
    for rid in idx.regions_of[s]:
        try:
            seq, length = landmark_shortest_path(lg, attachments(idx, lg.landmarks, s, rid), ta, s, t)
        except NoPath:
            continue
        key = (length, len(seq), rid)
        if best is None or key < best[0]:
            best = (key, seq)
    if best is None:
        raise NoPath(f"no landmark path from {s} to {t}")
    (length, _, rid), seq = best
    return LandmarkPath(s, t, seq, length, region_sequence(idx, lg, s, t, seq, rid))


# --- verification ----------------------------------------------------------


def constrained_length(idx: RegionIndex, s: int, t: int, regions: Sequence[int]) -> int:
    """Length of closest-point routing through a fixed region sequence."""
    cur = s
    total = 0
    for a, b in zip(regions, regions[1:]):
        if cur in idx.projected(b):
            continue
        r = idx.graph(a)
        cross = [idx.copy_in[a][o] for o in idx.projected(a) & idx.projected(b)]
        if not cross:
            raise NoPath(f"regions {a} and {b} share no node")
        dist = bfs(r, idx.copy_in[a][cur])
        best = min(cross, key=lambda v: (dist.get(v, 1 << 60), idx.origin(v)))
        if best not in dist:
            raise NoPath(f"crossing into region {b} unreachable")
        total += dist[best]
        cur = idx.origin(best)
    last = regions[-1]
    r = idx.graph(last)
    dist = bfs(r, idx.copy_in[last][cur])
    return total + dist[idx.copy_in[last][t]]


@dataclass
class LandmarkReport:
    pairs: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def sample_pairs(nodes: Sequence[int], k: int, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    nodes = list(nodes)
    if len(nodes) * len(nodes) <= k:
        return [(a, b) for a in nodes for b in nodes]
    return [(rng.choice(nodes), rng.choice(nodes)) for _ in range(k)]


def verify_region_sequences(
    idx: RegionIndex, lg: LandmarkGraph, pairs: Iterable[tuple[int, int]]
) -> LandmarkReport:
    """Closest-point routing through the landmark path's regions is exact."""
    g = idx.base
    cache: dict[int, dict[int, int]] = {}
    violations = []
    n = 0
    for s, t in pairs:
        if set(idx.regions_of[s]) & set(idx.regions_of[t]):
            continue
        n += 1
        if s not in cache:
            cache[s] = bfs(g, s)
        want = cache[s][t]
        try:
            lp = landmark_path(idx, lg, s, t)
            got = constrained_length(idx, s, t, lp.regions)
        except NoPath as exc:
            violations.append(f"{s}->{t}: {exc}")
            continue
        if got != want:
            violations.append(f"{s}->{t}: regions {lp.regions}, constrained {got}, bfs {want}")
    return LandmarkReport(n, violations)
