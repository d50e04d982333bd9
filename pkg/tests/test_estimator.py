import pytest

from conftest import fixture_graph
from gridroute import GridRouter
from gridroute.scenario import fixture_points


def test_fit_predict_score():
    est = GridRouter().fit(fixture_points("DONUT"))
    (path,) = est.predict([(3, 4)])
    assert path[0] == 3 and path[-1] == 4 and len(path) == 5
    pairs = [(s, t) for s in range(8) for t in range(8)]
    assert est.score(pairs) == 1.0
    assert est.sizes_.landmarks == len(est.router_.lg.landmarks)
    assert est.ledger_.total > 0


def test_params_and_graph_input():
    est = GridRouter(c_g=2)
    assert est.get_params() == {"c_l": 1, "c_g": 2, "strict": False}
    est.set_params(c_l=3)
    assert est.c_l == 3 and "c_l=3" in repr(est)
    with pytest.raises(ValueError):
        est.set_params(bogus=1)
    est.fit(fixture_graph("RECT_3x2"))
    assert est.predict([(0, 5)]) == [est.router_.route(0, 5).nodes]


def test_unfitted():
    with pytest.raises(RuntimeError):
        GridRouter().predict([(0, 1)])
