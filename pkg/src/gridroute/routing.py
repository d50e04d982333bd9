"""Node labels, routing tables and hop-by-hop packet forwarding."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .decomposition import Decomposition
from .errors import HopBudgetExceeded, NoPath
from .grid import GridPath, N, S, path_from_nodes
from .hybrid import HybridParams, RoundLedger, butterfly_cost, ceil_log2
from .landmarks import (
    LandmarkGraph,
    RegionIndex,
    attachments,
    build_landmark_graph,
    mark_landmarks,
    region_moves,
)
from .sssp import SpspSolution, spsp
from .virtual import straight_run


@dataclass(frozen=True)
class NodeLabel:
    """Routing label of one node.

    ``entries`` are the important landmarks of the home region with exact
    distances.  ``portals`` lists (region id, vertical portal id) for every
    region holding the node; it drives routing inside a region and is sized
    separately from the core label.
    """

    node: int
    region: int
    entries: tuple[tuple[int, int], ...]
    portals: tuple[tuple[int, int], ...]

    def core_fields(self) -> int:
        return 2 + 2 * len(self.entries)

    def extension_fields(self) -> int:
        return 2 * len(self.portals)

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "region": self.region,
            "entries": [list(e) for e in self.entries],
            "portals": [list(p) for p in self.portals],
        }


@dataclass(frozen=True)
class Identifiers:
    regions: tuple[int, ...]
    gates: dict[int, tuple[int, ...]]  # gate id -> regions sharing its nodes
    node_regions: dict[int, tuple[int, ...]]


def assign_identifiers(idx: RegionIndex, ledger: RoundLedger | None = None) -> Identifiers:
    gates = {}
    for r in idx.d.regions:
        for g in r.gates:
            proj = {idx.origin(v) for v in g.nodes}
            shared = set.intersection(*(set(idx.regions_of[o]) for o in proj))
            gates[g.id] = tuple(sorted(shared | {r.id}))
    if ledger is not None:
        ledger.charge("identifiers", len(idx.regions), 3 * max(1, ceil_log2(idx.base.n)))
    return Identifiers(
        tuple(sorted(idx.regions)), gates, {v: tuple(rs) for v, rs in sorted(idx.regions_of.items())}
    )


def portal_ids(idx: RegionIndex, rid: int) -> dict[int, int]:
    """Vertical portal id (smallest node id on it) of every node of a region."""
    r = idx.graph(rid)
    out: dict[int, int] = {}
    for v in r.nodes():
        if v in out:
            continue
        run = straight_run(r, v, True)
        pid = min(run)
        for u in run:
            out[u] = pid
    return out


def build_labels(idx: RegionIndex, lg: LandmarkGraph) -> dict[int, NodeLabel]:
    pids = {rid: portal_ids(idx, rid) for rid in idx.regions}
    out = {}
    for v in sorted(idx.base.pos):
        home = idx.home(v)
        ent = tuple(attachments(idx, lg.landmarks, v, home))
        portals = tuple((rid, pids[rid][idx.copy_in[rid][v]]) for rid in idx.regions_of[v])
        out[v] = NodeLabel(v, home, ent, portals)
    return out


# --- forwarding ------------------------------------------------------------


@dataclass
class TargetState:
    """Landmark-graph distances towards one target, shared by every hop."""

    label: NodeLabel
    dist: dict[int, int]
    hops: dict[int, int]
    nxt: dict[int, int | None]  # None: leave the landmark graph for the target

    def path_from(self, l: int) -> list[int]:
        out = [l]
        while self.nxt[out[-1]] is not None:
            out.append(self.nxt[out[-1]])
        return out


@dataclass
class Router:
    """Hop-by-hop router over a decomposed grid graph.

    Every node holds the same landmark graph; a packet carries the target's
    label.  Inside a shared region the packet walks to the target's vertical
    portal and then along it.  Otherwise the node evaluates the landmark
    graph towards the target, derives the next region of the landmark path
    and steps towards the closest node shared with it.
    """

    idx: RegionIndex
    lg: LandmarkGraph
    labels: dict[int, NodeLabel]
    _portal: dict[tuple[int, int], SpspSolution] = field(default_factory=dict, repr=False)
    _pids: dict[int, dict[int, int]] = field(default_factory=dict, repr=False)
    _runs: dict[tuple[int, int], list[int]] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, d: Decomposition, strict: bool = False, ledger: RoundLedger | None = None) -> Router:
        idx = RegionIndex(d)
        lg = build_landmark_graph(idx, mark_landmarks(idx, ledger), strict=strict, ledger=ledger)
        return cls(idx, lg, build_labels(idx, lg))

    @property
    def graph(self):
        return self.idx.base

    def _portal_run(self, rid: int, pid: int) -> list[int]:
        key = (rid, pid)
        if key not in self._runs:
            self._runs[key] = straight_run(self.idx.graph(rid), pid, True)
        return self._runs[key]

    def portal_table(self, rid: int, pid: int) -> SpspSolution:
        key = (rid, pid)
        if key not in self._portal:
            self._portal[key] = spsp(self.idx.graph(rid), self._portal_run(rid, pid))
        return self._portal[key]

    def target_state(self, t: int) -> TargetState:
        lab = self.labels[t]
        dist: dict[int, int] = {}
        hops: dict[int, int] = {}
        nxt: dict[int, int | None] = {}
        heap = []
        for l, d in lab.entries:
            heapq.heappush(heap, (d, 1, -1, l))
        adj = self.lg.adj
        while heap:
            d, h, via, l = heapq.heappop(heap)
            if l in dist:
                continue
            dist[l], hops[l], nxt[l] = d, h, (None if via < 0 else via)
            for x, e in adj.get(l, {}).items():
                if x not in dist:
                    heapq.heappush(heap, (d + e.w, h + 1, l, x))
        return TargetState(lab, dist, hops, nxt)

    def intra_region_next_hop(self, v: int, lab: NodeLabel) -> int | None:
        if v == lab.node:
            return None
        mine = set(self.idx.regions_of[v])
        rid, pid = min((r, p) for r, p in lab.portals if r in mine)
        r = self.idx.graph(rid)
        cv = self.idx.copy_in[rid][v]
        if cv in self._portal_run(rid, pid):
            ct = self.idx.copy_in[rid][lab.node]
            step = N if r.pos[ct][1] > r.pos[cv][1] else S
            return self.idx.origin(r.adj[cv][step])
        return self.idx.origin(self.portal_table(rid, pid).next_hop[cv])

    def region_plan(self, v: int, state: TargetState) -> tuple[int, ...]:
        """Region sequence of v's shortest landmark path towards the target."""
        cands = [
            (d + state.dist[l], state.hops[l], rid, l)
            for rid in self.idx.regions_of[v]
            for l, d in attachments(self.idx, self.lg.landmarks, v, rid)
            if l in state.dist
        ]
        if not cands:
            raise NoPath(f"no landmark path from {v} to {state.label.node}")
        _, _, start, l = min(cands)
        moves = region_moves(self.idx, self.lg, v, state.label.node, state.path_from(l), start=start)
        return (start,) + tuple(m.dst for m in moves)

    def next_crossing(self, v: int, state: TargetState) -> tuple[int, int] | None:
        """First (region, next region) pair of the plan that v is not yet in."""
        plan = self.region_plan(v, state)
        for a, b in zip(plan, plan[1:]):
            if v not in self.idx.projected(b):
                return a, b
        return None

    def forward(self, v: int, state: TargetState) -> int | None:
        lab = state.label
        if v == lab.node:
            return None
        mine = set(self.idx.regions_of[v])
        if mine & {r for r, _ in lab.portals}:
            return self.intra_region_next_hop(v, lab)
        step = self.next_crossing(v, state)
        if step is None:
            raise NoPath(f"landmark path from {v} never leaves its regions")
        a, b = step
        sol = self.idx.crossing(a, b)
        return self.idx.origin(sol.next_hop[self.idx.copy_in[a][v]])

    def next_gate(self, v: int, t: int) -> int | None:
        """Gate of the current region crossed next (None inside a shared region).

        When the crossing is diagonal the smallest id among the gates holding
        the entry node is returned.
        """
        if set(self.idx.regions_of[v]) & set(self.idx.regions_of[t]):
            return None
        step = self.next_crossing(v, self.target_state(t))
        if step is None:
            return None
        a, b = step
        sol = self.idx.crossing(a, b)
        entry = sol.entry(self.idx.copy_in[a][v])
        gates = [g.id for g in self.idx.regions[a].gates if entry in g.nodes]
        return min(gates) if gates else None

    def route(self, s: int, t: int, budget: int | None = None, state: TargetState | None = None) -> GridPath:
        state = state or self.target_state(t)
        budget = budget if budget is not None else 4 * self.graph.n + 4
        nodes = [s]
        seen = {s}
        v = s
        while v != t:
            w = self.forward(v, state)
            if w is None:
                break
            if w in seen or len(nodes) > budget:
                raise HopBudgetExceeded(f"routing loop from {s} to {t} at node {w}")
            seen.add(w)
            nodes.append(w)
            v = w
        return path_from_nodes(self.graph, nodes)


# --- sizes and costs -------------------------------------------------------


@dataclass(frozen=True)
class SizeReport:
    log_n: int
    max_label_bits: int
    max_extension_bits: int
    table_bits: int
    intra_table_bits: int
    landmarks: int
    landmark_edges: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def measure_sizes(router: Router) -> SizeReport:
    """Canonical encoding: every id and distance is a ceil(log2 n)-bit field."""
    log_n = max(1, ceil_log2(router.graph.n))
    labels = router.labels.values()
    core = max((l.core_fields() for l in labels), default=0) * log_n
    ext = max((l.extension_fields() for l in labels), default=0) * log_n
    lg = router.lg
    fields = len(lg.landmarks) + sum(3 + len(e.regions) for e in lg.edges.values())
    # next hop and offset towards every vertical portal of the node's regions
    intra = 0
    for v in router.graph.pos:
        cnt = 0
        for rid in router.idx.regions_of[v]:
            r = router.idx.graph(rid)
            cnt += sum(1 for u in r.pos if u not in r.adj or S not in r.adj[u])
        intra = max(intra, 2 * cnt * log_n)
    return SizeReport(log_n, core, ext, fields * log_n, intra, len(lg.landmarks), len(lg.edges))


def distribute_cost(lg: LandmarkGraph, params: HybridParams, ledger: RoundLedger | None = None) -> int:
    """Rounds for every node to learn the landmark graph."""
    rounds = butterfly_cost(len(lg.edges), params) + params.log_n if lg.edges else params.log_n
    if ledger is not None:
        ledger.charge("distribution", len(lg.edges), rounds)
    return rounds
