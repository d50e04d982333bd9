import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import blobs, fixture_graph
from oracles import raster_holes
from gridroute.decomposition import (
    Decomposition, build_regions, convex_split, decompose, find_junction_portals,
    portal_tree_no_cavities, simple_decomposition, split_junctions, verify_decomposition,
)
from gridroute.grid import E, N, S, build_graph, count_inner_holes
from gridroute.scenario import corrupt_decomposition
from gridroute.virtual import VirtualGraph, split_line, split_node, straight_run


def test_split_path_at_portal():
    g = fixture_graph("PATH_5")
    vg = split_line(VirtualGraph.from_grid(g), [g.at((2, 0))], vertical=True)
    left, right = vg.regions()
    assert {vg.graph.origin[v] for v in left} == {0, 1, 2}
    assert {vg.graph.origin[v] for v in right} == {2, 3, 4}


def test_donut_splits():
    g = fixture_graph("DONUT")
    col = [g.at((0, y)) for y in range(3)]
    vg = split_line(VirtualGraph.from_grid(g), col, vertical=True)
    comps = vg.regions()
    assert len(comps) == 2 and sorted(comps[0]) == sorted(col)
    twin = dict(zip(vg.records[-1].nodes, vg.records[-1].created))
    top = g.at((0, 2))
    vg2 = split_node(vg, twin[top], keep_first=(N, E), vertical=True)
    copies = {v: vg2.graph.adj[v] for v in vg2.graph.pos if vg2.graph.origin[v] == top and v != top}
    dirs = sorted(tuple(a) for a in copies.values())
    assert dirs == sorted([(E,), (S,)])


@pytest.mark.parametrize("name,count", [("RECT_3x2", 1), ("DONUT", 2), ("DOUBLE_DONUT", 3), ("QUADRANTS", 3)])
def test_stage_one_region_counts(name, count):
    g = fixture_graph(name)
    d = simple_decomposition(g)
    assert len(d.regions) == count <= count_inner_holes(g) + 1
    assert all(count_inner_holes(d.region_graph(r.id)) == 0 for r in d.regions)


def test_donut_stage_one_shapes():
    g = fixture_graph("DONUT")
    d = simple_decomposition(g)
    sizes = sorted(len(d.projected(r.id)) for r in d.regions)
    # isolated left column; the opened ring still touches the column's ends
    assert sizes == [3, 8]


def test_junctions():
    for name in ("RECT_3x2", "DONUT", "PATH_5", "PLUS"):
        assert find_junction_portals(simple_decomposition(fixture_graph(name))) == []
    g = fixture_graph("QUADRANTS")
    d1 = simple_decomposition(g)
    js = find_junction_portals(d1)
    column = lambda x: {g.at((x, y)) for y in range(7)}
    # three corridors meet the centre column, and again the right border column
    assert [{d1.graph.origin[v] for v in j.portal} for j in js] == [column(3), column(6)]
    assert all(len(j.left) + len(j.right) == 3 for j in js)
    d2 = split_junctions(simple_decomposition(g))
    assert all(len(r.gates) <= 2 for r in d2.regions)
    assert all(gt.orientation == "v" for r in d2.regions for gt in r.gates)


def test_portal_tree_pruning():
    d = simple_decomposition(fixture_graph("RECT_3x2"))
    (r,) = d.regions
    assert portal_tree_no_cavities(d.region_graph(r.id), r) == {}
    d = simple_decomposition(fixture_graph("QUADRANTS"))
    degrees = []
    for r in d.regions:
        tree = portal_tree_no_cavities(d.region_graph(r.id), r)
        degrees += [len(nb) for nb in tree.values()]
    assert degrees.count(3) == 2 and max(degrees) == 3


def test_ring_tunnel_split_bounded():
    pts = [(x, y) for x in range(9) for y in range(3) if x in (0, 8) or y in (0, 2)]
    d = decompose(build_graph(pts))
    assert d.tunnel_sizes and max(d.tunnel_sizes.values()) <= 10
    assert verify_decomposition(d).ok


@pytest.mark.xfail(strict=True, reason="degenerate corridor case yields 5 regions here, see notes")
def test_ring_tunnel_split_into_at_most_four():
    pts = [(x, y) for x in range(9) for y in range(3) if x in (0, 8) or y in (0, 2)]
    d = decompose(build_graph(pts))
    assert max(d.tunnel_sizes.values()) <= 4


@pytest.mark.parametrize("name", ["RECT_3x2", "DONUT", "DOUBLE_DONUT", "QUADRANTS", "PLUS", "L_SHAPE", "PATH_5"])
def test_fixtures_pass_verification(name):
    g = fixture_graph(name)
    d = decompose(g)
    rep = verify_decomposition(d, exhaustive_limit=10**6)
    assert rep.ok, rep.violations
    assert len(d.regions) <= 10 * max(1, count_inner_holes(g))
    if name == "RECT_3x2":
        assert len(d.regions) == 1


def test_corrupted_decomposition_is_caught():
    d = decompose(fixture_graph("DONUT"))
    rep = verify_decomposition(corrupt_decomposition(d), exhaustive_limit=10**6)
    assert not rep.ok
    assert any("d_R" in v for v in rep.violations)


def test_json_export_round_trips():
    d = decompose(fixture_graph("DOUBLE_DONUT"))
    data = json.loads(json.dumps(d.to_json()))
    assert {r["id"] for r in data["regions"]} == {r.id for r in d.regions}
    assert len(data["projection"]) == d.graph.n


@settings(max_examples=25)
@given(blobs(max_side=11))
def test_stage_invariants_on_random_blobs(points):
    g = build_graph(points)
    holes = count_inner_holes(g)
    assert holes == raster_holes(points)
    d1 = simple_decomposition(g)
    assert len(d1.regions) <= holes + 1
    assert all(count_inner_holes(d1.region_graph(r.id)) == 0 for r in d1.regions)
    d2 = split_junctions(d1)
    assert all(len(r.gates) <= 2 for r in d2.regions)
    d3 = convex_split(d2)
    assert max(d3.tunnel_sizes.values(), default=0) <= 10
    rep = verify_decomposition(d3)
    assert rep.ok, rep.violations


@settings(max_examples=25)
@given(blobs(max_side=10), st.randoms(use_true_random=False))
def test_extra_portal_split_keeps_convexity(points, rng):
    d = decompose(build_graph(points))
    reg = rng.choice(d.regions)
    r = d.region_graph(reg.id)
    vertical = rng.random() < 0.5
    run = straight_run(r, rng.choice(r.nodes()), vertical)
    vg = split_line(d.vg, run, vertical=vertical)
    extra = Decomposition(d.base, vg, build_regions(vg), "extra", hole_count=d.hole_count)
    assert verify_decomposition(extra).ok
