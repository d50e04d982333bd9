import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from gridroute.grid import build_graph  # noqa: E402
from gridroute.scenario import fixture_points  # noqa: E402
from oracles import blob  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fixture_graph(name):
    return build_graph(fixture_points(name))


@pytest.fixture(params=["RECT_3x2", "DONUT", "DOUBLE_DONUT", "PATH_5", "PLUS", "QUADRANTS", "L_SHAPE"])
def fixture_name(request):
    return request.param


@st.composite
def blobs(draw, max_side=10):
    seed = draw(st.integers(0, 10**6))
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    p = draw(st.sampled_from([0.0, 0.05, 0.1, 0.2, 0.3]))
    return blob(seed, w, h, p)


@st.composite
def histograms(draw, max_width=12, max_height=8):
    """Column-convex shapes whose neighbouring columns overlap (hole-free)."""
    w = draw(st.integers(1, max_width))
    pts = []
    lo, hi = 0, draw(st.integers(0, max_height - 1))
    for x in range(w):
        if x:
            h = draw(st.integers(1, max_height))
            # the new column must share at least one row with the previous one
            nlo = draw(st.integers(lo - h + 1, hi))
            lo, hi = nlo, nlo + h - 1
        pts += [(x, y) for y in range(lo, hi + 1)]
    return pts


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
