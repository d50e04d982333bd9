"""Round accounting for the hybrid local/global model and its basic primitives.

Two modes exist.  The cost model only charges rounds to a ledger.  The
message-level mode actually exchanges messages round by round and fails
loudly when a node would exceed its local or global bit budget.
"""

from __future__ import annotations

import csv
import io
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import BudgetExceeded, DegreeTooHigh, NotATree
from .grid import DIRECTIONS, E, N, S, W, GridGraph, detect_holes, hole_cells


def ceil_log2(x: int) -> int:
    return 0 if x <= 1 else (x - 1).bit_length()


@dataclass(frozen=True)
class HybridParams:
    """Per-round budgets: lam bits per local edge, gamma bits per node globally."""

    n: int
    c_l: int = 1
    c_g: int = 1

    def __post_init__(self) -> None:
        if self.n < 1 or self.c_l < 1 or self.c_g < 1:
            raise ValueError("n, c_l and c_g must be positive")

    @property
    def log_n(self) -> int:
        return max(1, ceil_log2(self.n))

    @property
    def local_bits(self) -> int:
        return self.c_l * self.log_n

    @property
    def global_bits(self) -> int:
        return self.c_g * self.log_n**2


@dataclass(frozen=True)
class LedgerEntry:
    stage: str
    size: int
    rounds: int


@dataclass
class RoundLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def charge(self, stage: str, size: int, rounds: int) -> int:
        self.entries.append(LedgerEntry(stage, int(size), int(rounds)))
        return rounds

    @property
    def total(self) -> int:
        return sum(e.rounds for e in self.entries)

    def by_stage(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.entries:
            out[e.stage] = out.get(e.stage, 0) + e.rounds
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "size", "rounds"])
        for e in self.entries:
            w.writerow([e.stage, e.size, e.rounds])
        return buf.getvalue()


def _charge(ledger: RoundLedger | None, stage: str, size: int, rounds: int) -> None:
    if ledger is not None:
        ledger.charge(stage, size, rounds)


# --- pointer jumping -------------------------------------------------------


@dataclass(frozen=True)
class PointerStruct:
    """Shortcut pointers on a path or cycle.

    ``left[v][i]`` / ``right[v][i]`` hold the node 2**i positions away (level
    i + 1 in one-based terms), or None past an end of a path.
    """

    ids: tuple[Hashable, ...]
    cycle: bool
    left: dict[Hashable, tuple[Hashable | None, ...]]
    right: dict[Hashable, tuple[Hashable | None, ...]]
    rounds: int

    @property
    def levels(self) -> int:
        return ceil_log2(len(self.ids))

    def overlay(self) -> dict[Hashable, set[Hashable]]:
        adj: dict[Hashable, set[Hashable]] = {v: set() for v in self.ids}
        for v in self.ids:
            for u in self.left[v] + self.right[v]:
                if u is not None and u != v:
                    adj[v].add(u)
                    adj[u].add(v)
        return adj

    def max_degree(self) -> int:
        return max((len(s) for s in self.overlay().values()), default=0)

    def eccentricity(self, sources: Iterable[Hashable]) -> int:
        adj = self.overlay()
        worst = 0
        for s in sources:
            dist = {s: 0}
            q = deque([s])
            while q:
                v = q.popleft()
                for u in adj[v]:
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        q.append(u)
            worst = max(worst, max(dist.values()))
        return worst

    def diameter(self, sample: int | None = None, seed: int = 0) -> int:
        """Exact overlay diameter, or a lower bound from sampled sources."""
        if sample is None or sample >= len(self.ids):
            return self.eccentricity(self.ids)
        rng = random.Random(seed)
        picks = {self.ids[0], self.ids[-1], self.ids[len(self.ids) // 2]}
        picks.update(rng.sample(self.ids, sample))
        return self.eccentricity(picks)


def _base_neighbors(ids: Sequence[Hashable], cycle: bool) -> tuple[dict, dict]:
    L = len(ids)
    lft, rgt = {}, {}
    for k, v in enumerate(ids):
        if cycle:
            lft[v] = ids[(k - 1) % L] if L > 1 else None
            rgt[v] = ids[(k + 1) % L] if L > 1 else None
        else:
            lft[v] = ids[k - 1] if k > 0 else None
            rgt[v] = ids[k + 1] if k + 1 < L else None
    return lft, rgt


def pointer_jumping(
    ids: Sequence[Hashable],
    cycle: bool = False,
    ledger: RoundLedger | None = None,
    params: HybridParams | None = None,
    message_level: bool = False,
    order_seed: int | None = None,
    stage: str = "pointer_jumping",
) -> PointerStruct:
    """Build doubling pointers on a path (or cycle) given in order."""
    ids = tuple(ids)
    L = len(ids)
    K = ceil_log2(L)
    if message_level:
        left, right, rounds = _pj_messages(ids, cycle, K, params or HybridParams(max(L, 2)), order_seed)
    else:
        left, right = {}, {}
        pos = {v: k for k, v in enumerate(ids)}
        for v in ids:
            lv, rv = [], []
            for i in range(K):
                step = 1 << i
                k = pos[v]
                if cycle:
                    lv.append(ids[(k - step) % L])
                    rv.append(ids[(k + step) % L])
                else:
                    lv.append(ids[k - step] if k - step >= 0 else None)
                    rv.append(ids[k + step] if k + step < L else None)
            left[v], right[v] = tuple(lv), tuple(rv)
        rounds = K
    _charge(ledger, stage, L, rounds)
    return PointerStruct(ids, cycle, left, right, rounds)


def _pj_messages(ids, cycle, K, params, order_seed):
    lft, rgt = _base_neighbors(ids, cycle)
    left = {v: [] for v in ids}
    right = {v: [] for v in ids}
    if K == 0:
        return {v: () for v in ids}, {v: () for v in ids}, 0
    # round 1: every node tells its two path neighbours its id over local edges
    for v in ids:
        if params.log_n > params.local_bits:
            raise BudgetExceeded("local edge budget exceeded")
        left[v].append(lft[v])
        right[v].append(rgt[v])
    rounds = 1
    order = list(ids)
    rng = random.Random(order_seed) if order_seed is not None else None
    for _ in range(1, K):
        if rng is not None:
            rng.shuffle(order)
        inbox: dict[Hashable, list[tuple[str, Hashable | None]]] = {v: [] for v in ids}
        sent: dict[Hashable, int] = {v: 0 for v in ids}
        for v in order:
            lv, rv = left[v][-1], right[v][-1]
            # v introduces its two current partners to each other
            if rv is not None:
                inbox[rv].append(("L", lv))
                sent[v] += params.log_n
            if lv is not None:
                inbox[lv].append(("R", rv))
                sent[v] += params.log_n
        for v in ids:
            got = params.log_n * len(inbox[v])
            if sent[v] > params.global_bits or got > params.global_bits:
                raise BudgetExceeded(f"node {v!r} exceeds the global budget")
            nl = next((x for tag, x in inbox[v] if tag == "L"), None)
            nr = next((x for tag, x in inbox[v] if tag == "R"), None)
            left[v].append(nl)
            right[v].append(nr)
        rounds += 1
    return {v: tuple(left[v]) for v in ids}, {v: tuple(right[v]) for v in ids}, rounds


def broadcast(
    ps: PointerStruct,
    source: Hashable,
    message: object,
    ledger: RoundLedger | None = None,
    params: HybridParams | None = None,
    message_level: bool = False,
    stage: str = "broadcast",
) -> tuple[dict[Hashable, object], int]:
    """Spread ``message`` from ``source`` using levels from largest to smallest."""
    K = ps.levels
    if not message_level:
        _charge(ledger, stage, len(ps.ids), K)
        return {v: message for v in ps.ids}, K
    params = params or HybridParams(max(len(ps.ids), 2))
    have = {source: message}
    rounds = 0
    for i in reversed(range(K)):
        recv: dict[Hashable, int] = {}
        new = {}
        for v in list(have):
            for u in (ps.left[v][i], ps.right[v][i]):
                if u is not None and u not in have:
                    new[u] = have[v]
                    recv[u] = recv.get(u, 0) + params.log_n
        if any(b > params.global_bits for b in recv.values()):
            raise BudgetExceeded("broadcast exceeds the global budget")
        have.update(new)
        rounds += 1
    _charge(ledger, stage, len(ps.ids), rounds)
    return have, rounds


def aggregate(
    ps: PointerStruct,
    values: dict[Hashable, object],
    op: str | Callable = "min",
    ledger: RoundLedger | None = None,
    params: HybridParams | None = None,
    message_level: bool = False,
    stage: str = "aggregate",
) -> tuple[dict[Hashable, object], int]:
    """All-reduce with ``min`` or ``max``; every node ends with the result."""
    f = {"min": min, "max": max}.get(op, op) if isinstance(op, str) else op
    K = ps.levels
    if not message_level:
        total = f(values[v] for v in ps.ids)
        _charge(ledger, stage, len(ps.ids), K)
        return {v: total for v in ps.ids}, K
    params = params or HybridParams(max(len(ps.ids), 2))
    cur = dict(values)
    rounds = 0
    for i in range(K):
        nxt = {}
        for v in ps.ids:
            got = [cur[u] for u in (ps.left[v][i], ps.right[v][i]) if u is not None]
            if params.log_n * len(got) > params.global_bits:
                raise BudgetExceeded("aggregation exceeds the global budget")
            nxt[v] = f([cur[v], *got])
        cur = nxt
        rounds += 1
    _charge(ledger, stage, len(ps.ids), rounds)
    return cur, rounds


# --- Euler tour ------------------------------------------------------------


@dataclass(frozen=True)
class EulerTour:
    """One virtual node per directed tree edge, owned by the edge's tail."""

    path: tuple[tuple[Hashable, Hashable | None], ...]

    @property
    def owners(self) -> tuple[Hashable, ...]:
        return tuple(t for t, _ in self.path)

    def owned(self) -> dict[Hashable, int]:
        out: dict[Hashable, int] = {}
        for t, _ in self.path:
            out[t] = out.get(t, 0) + 1
        return out


def euler_tour(
    adj: dict[Hashable, Iterable[Hashable]],
    root: Hashable | None = None,
    ledger: RoundLedger | None = None,
    max_degree: int = 4,
) -> EulerTour:
    nbrs = {v: sorted(set(us)) for v, us in adj.items()}
    for v, us in nbrs.items():
        if len(us) > max_degree:
            raise DegreeTooHigh(f"node {v!r} has degree {len(us)}")
    m = sum(len(us) for us in nbrs.values())
    if m != 2 * (len(nbrs) - 1):
        raise NotATree("edge count does not match a tree")
    root = min(nbrs) if root is None else root
    if len(nbrs) == 1:
        _charge(ledger, "euler_tour", 1, 1)
        return EulerTour(((root, None),))
    path: list[tuple[Hashable, Hashable]] = []
    seen = {root}
    stack: list[tuple[Hashable, Hashable | None, int]] = [(root, None, 0)]
    while stack:
        v, parent, k = stack.pop()
        kids = [u for u in nbrs[v] if u != parent]
        if k < len(kids):
            u = kids[k]
            stack.append((v, parent, k + 1))
            if u in seen:
                raise NotATree("cycle found during tour")
            seen.add(u)
            path.append((v, u))
            stack.append((u, v, 0))
        elif parent is not None:
            path.append((v, parent))
    if len(seen) != len(nbrs):
        raise NotATree("tree is not connected")
    _charge(ledger, "euler_tour", len(path), 1)
    return EulerTour(tuple(path))


# --- hole ids --------------------------------------------------------------


@dataclass(frozen=True)
class HoleIds:
    ids: dict[int, int]  # hole index (detection order) -> hole id
    known: dict[int, tuple[int, ...]]  # node -> ids of the holes on whose boundary it lies
    rounds: int


def assign_hole_ids(
    g: GridGraph,
    ledger: RoundLedger | None = None,
    params: HybridParams | None = None,
    message_level: bool = False,
) -> HoleIds:
    """Elect each hole's id as the minimum over its boundary and tell the boundary."""
    holes = detect_holes(g)
    label, _ = hole_cells(g)
    params = params or HybridParams(max(g.n, 2))
    known: dict[int, set[int]] = {}
    ids: dict[int, int] = {}
    worst = 0
    for k, h in enumerate(holes):
        cyc = list(dict.fromkeys(h.boundary))
        # a node is a candidate for this hole if it is east-incident to it
        cand = {}
        for v in cyc:
            x, y = g.pos[v]
            if g.at((x, y + 1)) is None and label.get((x, y)) is not None:
                if (x, y) in h.cells:
                    cand[v] = v
        vals = {v: cand.get(v, float("inf")) for v in cyc}
        ps = pointer_jumping(cyc, cycle=True, params=params, message_level=message_level)
        agg, r2 = aggregate(ps, vals, "min", params=params, message_level=message_level)
        hid = agg[cyc[0]]
        ids[k] = int(hid)
        for v in cyc:
            known.setdefault(v, set()).add(int(hid))
        worst = max(worst, ps.rounds + r2)
    _charge(ledger, "hole_ids", max((len(h.boundary) for h in holes), default=0), worst)
    return HoleIds(ids, {v: tuple(sorted(s)) for v, s in known.items()}, worst)


# --- overlay path ----------------------------------------------------------


@dataclass(frozen=True)
class OverlayPath:
    tree_edges: tuple[tuple[int, int], ...]
    removed: tuple[tuple[int, int], ...]
    path: tuple[tuple[int, int | None], ...]  # (owner, partner) virtual nodes in order

    @property
    def owners(self) -> tuple[int, ...]:
        return tuple(o for o, _ in self.path)


def vertical_portals(g: GridGraph) -> list[list[int]]:
    """Maximal vertical runs, each listed bottom to top."""
    out = []
    for v in g.nodes():
        if S in g.adj[v]:
            continue
        run = [v]
        while N in g.adj[run[-1]]:
            run.append(g.adj[run[-1]][N])
        out.append(run)
    return out


def overlay_path(g: GridGraph, ledger: RoundLedger | None = None) -> OverlayPath:
    """A path of virtual nodes spanning the grid graph.

    Portals are joined by the bottommost horizontal edge of every adjacent
    pair; each inner hole then loses the left edge of the leftmost node that
    sits directly on top of it.  The resulting tree is flattened by an Euler
    tour unless it is a path already.
    """
    edges: set[tuple[int, int]] = set()
    for run in vertical_portals(g):
        for a, b in zip(run, run[1:]):
            edges.add((min(a, b), max(a, b)))
        b0 = run[0]
        for d in (W, E):
            u = g.adj[b0].get(d)
            if u is not None:
                edges.add((min(b0, u), max(b0, u)))
    removed = []
    if not g.is_virtual():
        label, outer = hole_cells(g)
        atop: dict[int, list[int]] = {}
        for v, (x, y) in g.pos.items():
            if g.at((x, y - 1)) is None:
                lab = label.get((x, y - 1))
                if lab is not None and lab != outer:
                    atop.setdefault(lab, []).append(v)
        for lab in sorted(atop):
            v = min(atop[lab], key=lambda u: (g.pos[u][0], -g.pos[u][1]))
            w = g.adj[v].get(W)
            if w is not None:
                e = (min(v, w), max(v, w))
                if e in edges:
                    edges.discard(e)
                    removed.append(e)
    adj: dict[int, list[int]] = {v: [] for v in g.pos}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    if len(edges) != g.n - 1:
        raise NotATree("portal skeleton is not a spanning tree")
    degs = [len(us) for us in adj.values()]
    if g.n == 1:
        path: tuple = ((g.nodes()[0], None),)
    elif max(degs) <= 2:
        start = min(v for v, us in adj.items() if len(us) == 1)
        order = [start]
        prev = None
        while len(order) < g.n:
            nxt = next(u for u in adj[order[-1]] if u != prev)
            prev = order[-1]
            order.append(nxt)
        path = tuple((v, None) for v in order)
        _charge(ledger, "euler_tour", len(order), 1)
    else:
        path = euler_tour(adj, ledger=ledger).path
    log_n = max(1, ceil_log2(g.n))
    _charge(ledger, "overlay_path", g.n, log_n)
    return OverlayPath(tuple(sorted(edges)), tuple(removed), path)


def butterfly_cost(messages: int, params: HybridParams) -> int:
    """Rounds to pipeline ``messages`` all-to-all broadcasts of log n bits each.

    Every node can inject c_g messages per round into the butterfly, and the
    pipeline needs about log n extra rounds to drain.
    """
    return -(-messages // params.c_g) + params.log_n
