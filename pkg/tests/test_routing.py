import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import blobs, fixture_graph, histograms
from oracles import distances, nx_graph
from gridroute.decomposition import decompose
from gridroute.grid import build_graph
from gridroute.hybrid import HybridParams, RoundLedger, ceil_log2
from gridroute.landmarks import LandmarkGraph
from gridroute.routing import Router, assign_identifiers, distribute_cost, measure_sizes
from test_landmarks import two_regions


def router_for(points_or_name):
    g = fixture_graph(points_or_name) if isinstance(points_or_name, str) else build_graph(points_or_name)
    return g, Router.build(decompose(g))


def all_exact(g, router):
    G = nx_graph(g)
    for t in g.nodes():
        state = router.target_state(t)
        dt = distances(G, t)
        for s in g.nodes():
            path = router.route(s, t, state=state)
            assert path.nodes[0] == s and path.nodes[-1] == t
            assert path.length == dt[s], (s, t)


def test_identifiers():
    _, r = router_for("RECT_3x2")
    ids = assign_identifiers(r.idx)
    assert ids.regions == (0,)
    g, d = two_regions()
    r = Router.build(d)
    ids = assign_identifiers(r.idx)
    assert len(ids.regions) == 2
    assert all(regs == ids.regions for regs in ids.gates.values())
    assert ids.node_regions[g.at((2, 0))] == ids.regions
    assert len(ids.node_regions[g.at((0, 0))]) == 1


def test_two_region_labels():
    g, d = two_regions()
    r = Router.build(d)
    gate = {g.at((2, 0)), g.at((2, 1))}
    inner = r.labels[g.at((0, 0))]
    assert {l for l, _ in inner.entries} == gate
    for v in gate:
        # on the gate itself the distances are offsets along it
        for l, d in r.labels[v].entries:
            assert d == abs(g.pos[l][1] - g.pos[v][1])
    assert r.labels[g.at((2, 0))].entries == ((g.at((2, 0)), 0), (g.at((2, 1)), 1))


@pytest.mark.parametrize("name", ["DONUT", "DOUBLE_DONUT", "QUADRANTS"])
def test_entry_distances_are_bfs(name):
    g, r = router_for(name)
    G = nx_graph(g)
    for v, lab in r.labels.items():
        dv = distances(G, v)
        assert all(dv[l] == d for l, d in lab.entries)
        assert len(lab.entries) <= 2 * max(len(reg.gates) for reg in r.idx.d.regions)


@settings(max_examples=20)
@given(blobs(max_side=10))
def test_entry_distances_are_bfs_on_blobs(points):
    g, r = router_for(points)
    G = nx_graph(g)
    for v, lab in r.labels.items():
        dv = distances(G, v)
        assert all(dv[l] == d for l, d in lab.entries)


def test_spec_routes():
    g, r = router_for("RECT_3x2")
    assert r.route(g.at((0, 0)), g.at((2, 1))).length == 3
    assert r.route(0, 0).length == 0 and r.forward(0, r.target_state(0)) is None
    g, r = router_for("DONUT")
    assert r.route(g.at((0, 1)), g.at((2, 1))).length == 4


@pytest.mark.parametrize("name", ["RECT_3x2", "DONUT", "DOUBLE_DONUT", "QUADRANTS", "PLUS", "L_SHAPE", "PATH_5"])
def test_fixtures_route_exactly(name):
    all_exact(*router_for(name))


def test_two_region_exact_and_next_gate():
    g, d = two_regions()
    r = Router.build(d)
    all_exact(g, r)
    (reg,) = [x for x in d.regions if g.at((0, 0)) in d.projected(x.id)]
    (gate,) = reg.gates
    assert r.next_gate(g.at((0, 0)), g.at((3, 1))) == gate.id
    assert r.next_gate(g.at((0, 0)), g.at((1, 1))) is None


def test_corner_fixture_next_gate_is_deterministic():
    g, r = router_for("QUADRANTS")
    _, r2 = router_for("QUADRANTS")
    for s in g.nodes():
        for t in g.nodes()[::3]:
            assert r.next_gate(s, t) == r2.next_gate(s, t)


@settings(max_examples=25)
@given(st.one_of(histograms(max_width=8, max_height=6), blobs(max_side=8)))
def test_random_shapes_route_exactly(points):
    all_exact(*router_for(points))


@settings(max_examples=15)
@given(st.one_of(histograms(max_width=8, max_height=6), blobs(max_side=8)))
def test_intra_next_hop_decreases_distance(points):
    g, r = router_for(points)
    G = nx_graph(g)
    for t in g.nodes()[::2]:
        lab = r.labels[t]
        dt = distances(G, t)
        for v in g.nodes():
            if v != t and set(r.idx.regions_of[v]) & set(r.idx.regions_of[t]):
                assert dt[r.intra_region_next_hop(v, lab)] == dt[v] - 1


@settings(max_examples=15)
@given(blobs(max_side=9))
def test_gate_tables_decrease_distance(points):
    g, r = router_for(points)
    for reg in r.idx.d.regions:
        for gate in reg.gates:
            sol = r.idx.gate_spsp(gate)
            for v, u in sol.next_hop.items():
                if u is not None:
                    assert sol.dist[u] == sol.dist[v] - 1


def test_labels_are_deterministic():
    pts = [(x, y) for x in range(12) for y in range(9) if not (3 <= x <= 4 and 2 <= y <= 5) and (x, y) != (8, 4)]
    _, a = router_for(pts)
    _, b = router_for(pts)
    dump = lambda r: json.dumps(
        [{str(v): l.to_json() for v, l in r.labels.items()}, r.lg.to_json()], sort_keys=True
    )
    assert dump(a) == dump(b)


def test_sizes_and_costs():
    g, r = router_for("RECT_3x2")
    sizes = measure_sizes(r)
    assert sizes.max_label_bits <= 3 * ceil_log2(g.n)
    assert sizes.landmarks == 0 and sizes.table_bits == 0
    p = HybridParams(g.n)
    led = RoundLedger()
    assert distribute_cost(LandmarkGraph({}), p, led) == p.log_n
    assert led.by_stage() == {"distribution": p.log_n}
    g, r = router_for("DONUT")
    assert distribute_cost(r.lg, HybridParams(g.n)) > HybridParams(g.n).log_n
