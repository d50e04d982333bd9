import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import fixture_graph
from gridroute.errors import DegreeTooHigh, NotATree
from gridroute.hybrid import (
    HybridParams, RoundLedger, aggregate, assign_hole_ids, broadcast, butterfly_cost,
    ceil_log2, euler_tour, overlay_path, pointer_jumping,
)


def test_ceil_log2():
    assert [ceil_log2(x) for x in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_params_budgets():
    p = HybridParams(1024, c_l=2, c_g=3)
    assert p.log_n == 10 and p.local_bits == 20 and p.global_bits == 3 * 10 * 10


def test_path_of_eight_levels():
    ps = pointer_jumping(range(8))
    assert ps.right[3] == (4, 5, 7) and ps.left[3] == (2, 1, None)
    assert ps.rounds == 3
    assert ps.diameter() == 3


def test_single_node_is_empty():
    ps = pointer_jumping([42])
    assert ps.rounds == 0 and ps.overlay() == {42: set()}


def test_cycle_of_five_within_three_hops():
    ps = pointer_jumping(range(5), cycle=True)
    assert ps.diameter() <= 3


@pytest.mark.parametrize("cycle", [False, True])
@given(L=st.integers(1, 300), seed=st.integers(0, 1000))
def test_message_level_agrees_with_cost_model(cycle, L, seed):
    a = pointer_jumping(range(L), cycle=cycle)
    b = pointer_jumping(range(L), cycle=cycle, message_level=True, order_seed=seed)
    assert a.rounds == b.rounds
    assert a.overlay() == b.overlay()


@given(L=st.integers(2, 600))
def test_overlay_degree_and_diameter(L):
    ps = pointer_jumping(range(L))
    bound = 2 * ceil_log2(L) + 2
    assert ps.max_degree() <= bound
    G = nx.Graph()
    G.add_nodes_from(range(L))
    G.add_edges_from((v, u) for v, us in ps.overlay().items() for u in us)
    assert nx.diameter(G) <= bound


def test_broadcast_and_aggregate():
    ps = pointer_jumping(range(8))
    got, r = broadcast(ps, 7, "m", message_level=True)
    assert got == {v: "m" for v in range(8)} and r == 3
    cyc = pointer_jumping(range(8), cycle=True)
    vals = dict(enumerate([3, 1, 4, 1, 5, 9, 2, 6]))
    for level in (False, True):
        res, _ = aggregate(cyc, vals, "min", message_level=level)
        assert set(res.values()) == {1}
    # id tiebreak when aggregating (value, id) pairs
    res, _ = aggregate(cyc, {v: (vals[v], v) for v in range(8)}, "min", message_level=True)
    assert set(res.values()) == {(1, 1)}


@pytest.mark.parametrize(
    "adj,size",
    [
        ({"a": ["b"], "b": ["a"]}, 2),
        ({0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}, 6),
        ({i: [j for j in (i - 1, i + 1) if 0 <= j < 5] for i in range(5)}, 8),
    ],
)
def test_euler_tour_sizes(adj, size):
    tour = euler_tour(adj)
    assert len(tour.path) == size
    # consecutive virtual nodes are linked by a tree edge or the same owner
    for (a, b), (c, _) in zip(tour.path, tour.path[1:]):
        assert b == c


def test_euler_tour_star_is_dfs_order():
    tour = euler_tour({0: [1, 2, 3], 1: [0], 2: [0], 3: [0]})
    assert tour.path == ((0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0))


def test_euler_tour_errors():
    with pytest.raises(NotATree):
        euler_tour({0: [1, 2], 1: [0, 2], 2: [0, 1]})
    with pytest.raises(DegreeTooHigh):
        euler_tour({0: [1, 2, 3, 4, 5], 1: [0], 2: [0], 3: [0], 4: [0], 5: [0]})


def test_hole_ids():
    g = fixture_graph("DONUT")
    ids = assign_hole_ids(g)
    # the only node with the inner hole directly north of it is (1,0)
    assert ids.ids[0] == g.at((1, 0))
    assert all(ids.ids[0] in k for k in ids.known.values())
    dd = assign_hole_ids(fixture_graph("DOUBLE_DONUT"))
    assert len(set(dd.ids.values())) == 3
    rect = assign_hole_ids(fixture_graph("RECT_3x2"))
    assert len(rect.ids) == 1


def test_hole_ids_message_level_matches():
    g = fixture_graph("QUADRANTS")
    assert assign_hole_ids(g).ids == assign_hole_ids(g, message_level=True).ids


def _spanning_tree_ok(g, op):
    G = nx.Graph()
    G.add_nodes_from(g.nodes())
    G.add_edges_from(op.tree_edges)
    return nx.is_tree(G)


def test_overlay_path_fixtures():
    p5 = fixture_graph("PATH_5")
    assert overlay_path(p5).owners == tuple(range(5))
    rect = fixture_graph("RECT_3x2")
    op = overlay_path(rect)
    assert len(op.path) == 10 and _spanning_tree_ok(rect, op)
    donut = fixture_graph("DONUT")
    op = overlay_path(donut)
    assert op.removed == ((donut.at((0, 2)), donut.at((1, 2))),)
    assert _spanning_tree_ok(donut, op)
    assert set(op.owners) == set(donut.nodes())


def test_butterfly_cost_and_ledger():
    p = HybridParams(1024, 1, 4)
    assert butterfly_cost(0, p) == 10 and butterfly_cost(9, p) == 13
    led = RoundLedger()
    led.charge("a", 5, 3)
    led.charge("a", 1, 2)
    led.charge("b", 1, 4)
    assert led.total == 9 and led.by_stage() == {"a": 5, "b": 4}
    assert led.to_csv().splitlines()[0].startswith("stage")
