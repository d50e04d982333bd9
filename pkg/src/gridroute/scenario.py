"""Scenario files and the end-to-end pipeline behind the command line."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

from .decomposition import Decomposition, Region, decompose, verify_decomposition
from .errors import GridRouteError, InfeasibleParams
from .grid import GridGraph, bfs, build_graph, count_inner_holes
from .generate import corridor, random_holes
from .hybrid import HybridParams, RoundLedger, ceil_log2
from .landmarks import verify_region_sequences
from .render import render_svg
from .routing import Router, assign_identifiers, distribute_cost, measure_sizes

FIXTURES = ("RECT_3x2", "DONUT", "DOUBLE_DONUT", "PATH_5", "PLUS", "QUADRANTS", "L_SHAPE")


def fixture_points(name: str) -> list[tuple[int, int]]:
    text = resources.files("gridroute").joinpath("fixtures").joinpath(f"{name}.json").read_text()
    return [tuple(p) for p in json.loads(text)["points"]]


def load_points(path: str | Path) -> list[tuple[int, int]]:
    with open(path) as fh:
        return [(int(x), int(y)) for x, y in json.load(fh)["points"]]


def dump_points(points) -> str:
    return json.dumps({"points": [[int(x), int(y)] for x, y in points]}) + "\n"


def generate_points(kind: str, params: dict[str, Any], seed: int) -> list[tuple[int, int]]:
    if kind == "random-holes":
        return random_holes(
            n=int(params.get("n", 1000)), k=int(params.get("k", 4)), seed=seed,
            max_side=params.get("max_side"), aspect=float(params.get("aspect", 1.0)),
        )
    if kind == "corridor":
        return corridor(
            length=int(params.get("length", 20)), width=int(params.get("width", 1)),
            turns=int(params.get("turns", 0)), seed=seed,
        )
    raise InfeasibleParams(f"unknown grid generator {kind!r}")


@dataclass
class Scenario:
    instance: dict[str, Any]  # {"file": path} | {"fixture": name} | {"generator": kind, ...params}
    verify: str = "full"
    output: str = "out"
    render: str | None = None
    seed: int = 0
    c_l: int = 1
    c_g: int = 1
    routes: int = 200
    corrupt: bool = False  # test hook: merge two regions before verification
    base_dir: str = "."

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        path = Path(path)
        with open(path) as fh:
            data = json.load(fh)
        if "instance" not in data:
            raise InfeasibleParams("scenario needs an 'instance' entry")
        params = data.get("params", {})
        return cls(
            instance=data["instance"],
            verify=data.get("verify", "full"),
            output=data.get("output", "out"),
            render=data.get("render"),
            seed=int(data.get("seed", 0)),
            c_l=int(params.get("c_l", 1)),
            c_g=int(params.get("c_g", 1)),
            routes=int(data.get("routes", 200)),
            corrupt=bool(data.get("corrupt", False)),
            base_dir=str(path.parent),
        )

    def points(self) -> list[tuple[int, int]]:
        src = self.instance
        if "fixture" in src:
            return fixture_points(src["fixture"])
        if "file" in src:
            p = Path(src["file"])
            return load_points(p if p.is_absolute() else Path(self.base_dir) / p)
        if "generator" in src:
            params = {k: v for k, v in src.items() if k != "generator"}
            return generate_points(src["generator"], params, int(src.get("seed", self.seed)))
        raise InfeasibleParams("instance needs 'fixture', 'file' or 'generator'")

    def depth(self) -> tuple[str, int]:
        if self.verify in ("full", "off"):
            return self.verify, 0
        if self.verify.startswith("sampled:"):
            k = int(self.verify.split(":", 1)[1])
            if k < 1:
                raise InfeasibleParams("sampled:K needs K >= 1")
            return "sampled", k
        raise InfeasibleParams(f"bad verification depth {self.verify!r}")


def corrupt_decomposition(d: Decomposition) -> Decomposition:
    """Merge the first two regions that share a node into one (test hook).

    The two copies of a shared gate node end up non-adjacent inside one
    region, so the convexity check must flag the merged region.
    """
    regs = sorted(d.regions, key=lambda r: r.id)
    for i, a in enumerate(regs):
        for b in regs[i + 1 :]:
            if d.projected(a.id) & d.projected(b.id):
                merged = Region(a.id, tuple(sorted(a.nodes + b.nodes)), a.gates + b.gates, a.walls + b.walls)
                rest = [r for r in d.regions if r.id not in (a.id, b.id)]
                return replace(d, regions=rest + [merged], _graphs={})
    if regs:
        # single region: drop its last node so coverage fails
        r = regs[0]
        return replace(d, regions=[Region(r.id, r.nodes[:-1], r.gates, r.walls)], _graphs={})
    return d


@dataclass
class RunResult:
    exit_code: int
    report: dict[str, Any]
    artifacts: dict[str, str] = field(default_factory=dict)

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in sorted(self.artifacts.items()):
            p = out / name
            p.write_text(text)
            written.append(p)
        return written


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def sample_route_pairs(g: GridGraph, k: int, seed: int, exhaustive_limit: int = 200) -> list[tuple[int, int]]:
    nodes = g.nodes()
    if g.n <= exhaustive_limit:
        return [(s, t) for t in nodes for s in nodes if s != t]
    rng = random.Random(seed)
    # grouped by target so the per-target landmark search is shared
    targets = rng.sample(nodes, max(1, min(g.n, k // 20 or 1)))
    per = max(1, k // len(targets))
    return [(s, t) for t in targets for s in rng.sample(nodes, min(per, g.n))]


def route_pairs(router: Router, pairs: list[tuple[int, int]]) -> tuple[list[list], list[str]]:
    g = router.graph
    rows, bad = [], []
    state = None
    dist: dict[int, int] = {}
    for s, t in pairs:
        if state is None or state.label.node != t:
            state = router.target_state(t)
            dist = bfs(g, t)
        try:
            length = router.route(s, t, state=state).length
        except GridRouteError as exc:
            bad.append(f"{s}->{t}: {type(exc).__name__}: {exc}")
            rows.append([s, t, -1, dist[s], False])
            continue
        exact = length == dist[s]
        if not exact:
            bad.append(f"{s}->{t}: routed {length}, bfs {dist[s]}")
        rows.append([s, t, length, dist[s], exact])
    return rows, bad


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run(scn: Scenario) -> RunResult:
    depth, k = scn.depth()
    points = scn.points()
    g = build_graph(points)
    holes = count_inner_holes(g)
    params = HybridParams(max(g.n, 2), scn.c_l, scn.c_g)
    ledger = RoundLedger()
    d = decompose(g, ledger)
    if scn.corrupt:
        d = corrupt_decomposition(d)
    arts: dict[str, str] = {"decomposition.json": _dumps(d.to_json())}
    verifiers: dict[str, Any] = {}
    violations: list[str] = []

    if depth != "off":
        rep = (
            verify_decomposition(d, exhaustive_limit=10**9, seed=scn.seed)
            if depth == "full"
            else verify_decomposition(d, exhaustive_limit=0, samples=k, seed=scn.seed)
        )
        verifiers["decomposition"] = rep.ok
        violations += [f"decomposition: {v}" for v in rep.violations]

    router = None
    if not violations:
        try:
            router = Router.build(d, ledger=ledger)
        except GridRouteError as exc:
            violations.append(f"landmarks: {type(exc).__name__}: {exc}")
    log_n = max(1, ceil_log2(g.n))
    h = max(1, holes)
    report: dict[str, Any] = {
        "n": g.n,
        "holes": holes,
        "regions": len(d.regions),
        "verify": scn.verify,
        "seed": scn.seed,
        "constants": {"regions_per_hole": round(len(d.regions) / h, 4)},
    }
    if router is not None:
        assign_identifiers(router.idx, ledger)
        distribute_cost(router.lg, params, ledger)
        sizes = measure_sizes(router)
        arts["landmarks.json"] = _dumps(router.lg.to_json())
        arts["labels.json"] = _dumps({str(v): lab.to_json() for v, lab in sorted(router.labels.items())})
        report["sizes"] = sizes.to_json()
        report["constants"].update(
            {
                "landmarks_per_hole_sq": round(len(router.lg.landmarks) / h**2, 4),
                "max_label_bits_per_log_n": round(sizes.max_label_bits / log_n, 4),
                "table_bits_per_hole_sq_log_n": round(sizes.table_bits / (h**2 * log_n), 4),
                "ledger_per_hole_sq_plus_log_n": round(ledger.total / (holes**2 + log_n), 4),
            }
        )
        rows: list[list] = []
        if depth != "off":
            want = scn.routes if depth == "full" else k
            pairs = sample_route_pairs(g, want, scn.seed)
            rows, bad = route_pairs(router, pairs)
            verifiers["routing"] = not bad
            violations += [f"routing: {b}" for b in bad[:50]]
            seq = verify_region_sequences(router.idx, router.lg, pairs)
            verifiers["region_sequence"] = seq.ok
            violations += [f"region_sequence: {v}" for v in seq.violations[:50]]
            report["routes_checked"] = len(rows)
        arts["routes.csv"] = _csv(["s", "t", "length", "bfs", "exact"], rows)
    report["ledger_total"] = ledger.total
    report["ledger_by_stage"] = ledger.by_stage()
    report["verifiers"] = verifiers
    report["violations"] = violations
    report["ok"] = not violations
    arts["ledger.csv"] = ledger.to_csv()
    if scn.render:
        lms = sorted(router.lg.landmarks) if router else []
        route = []
        if router is not None and g.n > 1:
            s, t = g.nodes()[0], g.nodes()[-1]
            try:
                route = list(router.route(s, t).nodes)
            except GridRouteError:
                route = []
        arts["render.svg"] = render_svg(d, lms, route, title=f"{g.n} nodes, {holes} holes")
    arts["report.json"] = _dumps(report)
    return RunResult(0 if not violations else 1, report, arts)
