"""Command line: ``gridroute run | generate | route``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decomposition import decompose
from .errors import GridRouteError
from .grid import bfs, build_graph
from .render import render_svg
from .routing import Router
from .scenario import Scenario, dump_points, generate_points, route_pairs, run, sample_route_pairs, _csv
from .udg import random_udg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
    p.add_argument("--verify", default=None, help="full | sampled:K | off")
    p.add_argument("--render", default=None, metavar="FILE", help="write an SVG figure")
    p.add_argument("--cl", type=int, default=None, help="local bandwidth factor")
    p.add_argument("--cg", type=int, default=None, help="global bandwidth factor")


def _scenario(args: argparse.Namespace) -> Scenario:
    if args.scenario:
        scn = Scenario.load(args.scenario)
    elif getattr(args, "instance", None):
        scn = Scenario({"file": str(Path(args.instance).resolve())})
    elif getattr(args, "fixture", None):
        scn = Scenario({"fixture": args.fixture})
    else:
        raise SystemExit("need --scenario, --instance or --fixture")
    if args.seed is not None:
        scn.seed = args.seed
    if args.verify is not None:
        scn.verify = args.verify
    if args.render is not None:
        scn.render = args.render
    if args.cl is not None:
        scn.c_l = args.cl
    if args.cg is not None:
        scn.c_g = args.cg
    return scn


def cmd_run(args: argparse.Namespace) -> int:
    scn = _scenario(args)
    if args.out:
        scn.output = args.out
    if args.corrupt:
        scn.corrupt = True
    res = run(scn)
    out = Path(scn.output)
    if not out.is_absolute() and args.scenario and not args.out:
        out = Path(scn.base_dir) / out
    svg = res.artifacts.pop("render.svg", None)
    res.write(out)
    if svg is not None:
        Path(scn.render).parent.mkdir(parents=True, exist_ok=True)
        Path(scn.render).write_text(svg)
    summary = {"ok": res.report["ok"], "output": str(out), "violations": res.report["violations"]}
    print(json.dumps(summary, indent=1, sort_keys=True))
    return res.exit_code


def cmd_generate(args: argparse.Namespace) -> int:
    seed = args.seed or 0
    if args.kind == "udg":
        text = json.dumps(random_udg(args.n, args.area, seed).to_json()) + "\n"
    else:
        params = {"n": args.n, "k": args.k, "length": args.length, "width": args.width, "turns": args.turns}
        text = dump_points(generate_points(args.kind, params, seed))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_route(args: argparse.Namespace) -> int:
    scn = _scenario(args)
    g = build_graph(scn.points())
    router = Router.build(decompose(g))
    if args.pairs:
        pairs = sample_route_pairs(g, args.pairs, scn.seed)
        rows, bad = route_pairs(router, pairs)
        sys.stdout.write(_csv(["s", "t", "length", "bfs", "exact"], rows))
        return 1 if bad else 0
    if args.src is None or args.dst is None:
        raise SystemExit("route needs --from and --to, or --pairs")
    path = router.route(args.src, args.dst)
    want = bfs(g, args.src)[args.dst]
    trace = {"hops": list(path.nodes), "length": path.length, "bfs": want, "exact": path.length == want}
    print(json.dumps(trace))
    if scn.render:
        Path(scn.render).write_text(render_svg(router.idx.d, sorted(router.lg.landmarks), path.nodes))
    return 0 if trace["exact"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridroute", description="Exact routing on grid graphs with holes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the pipeline on a scenario and write artifacts")
    p.add_argument("--scenario", metavar="FILE")
    p.add_argument("--instance", metavar="FILE")
    p.add_argument("--fixture")
    p.add_argument("--out", default=None, metavar="DIR")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("generate", help="write a seeded instance file")
    p.add_argument("kind", choices=["random-holes", "corridor", "udg"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--length", type=int, default=20)
    p.add_argument("--width", type=int, default=1)
    p.add_argument("--turns", type=int, default=0)
    p.add_argument("--area", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("route", help="route one pair (JSON trace) or sampled pairs (CSV)")
    p.add_argument("--scenario", metavar="FILE")
    p.add_argument("--instance", metavar="FILE")
    p.add_argument("--fixture")
    p.add_argument("--from", dest="src", type=int)
    p.add_argument("--to", dest="dst", type=int)
    p.add_argument("--pairs", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_route)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0].startswith("-") and argv[0] not in ("-h", "--help"):
        argv.insert(0, "run")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GridRouteError as exc:
        print(json.dumps({"ok": False, "error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
