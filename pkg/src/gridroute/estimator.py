"""Estimator-style wrapper: fit on a grid instance, predict routes."""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from .decomposition import Decomposition, decompose
from .grid import GridGraph, build_graph
from .hybrid import HybridParams, RoundLedger
from .routing import Router, SizeReport, distribute_cost, measure_sizes


class GridRouter:
    """Builds the routing scheme in ``fit`` and answers route queries.

    ``fit`` takes a point list (or a built grid graph).  ``predict`` takes
    (s, t) pairs and returns the routed node sequences; ``score`` returns the
    fraction of pairs routed along a shortest path.
    """

    def __init__(self, c_l: int = 1, c_g: int = 1, strict: bool = False) -> None:
        self.c_l = c_l
        self.c_g = c_g
        self.strict = strict

    def get_params(self, deep: bool = True) -> dict[str, Any]:
        return {"c_l": self.c_l, "c_g": self.c_g, "strict": self.strict}

    def set_params(self, **params: Any) -> GridRouter:
        for k, v in params.items():
            if k not in self.get_params():
                raise ValueError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def fit(self, X: GridGraph | Sequence[Sequence[int]], y: None = None) -> GridRouter:
        g = X if isinstance(X, GridGraph) else build_graph(X)
        self.ledger_ = RoundLedger()
        self.graph_: GridGraph = g
        self.decomposition_: Decomposition = decompose(g, self.ledger_, strict=self.strict)
        self.router_ = Router.build(self.decomposition_, strict=self.strict, ledger=self.ledger_)
        distribute_cost(self.router_.lg, HybridParams(max(g.n, 2), self.c_l, self.c_g), self.ledger_)
        self.sizes_: SizeReport = measure_sizes(self.router_)
        return self

    def _check(self) -> None:
        if not hasattr(self, "router_"):
            raise RuntimeError("GridRouter is not fitted yet")

    def predict(self, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
        self._check()
        return [self.router_.route(s, t).nodes for s, t in pairs]

    def score(self, pairs: Iterable[tuple[int, int]], y: None = None) -> float:
        from .grid import bfs

        self._check()
        pairs = list(pairs)
        if not pairs:
            return 1.0
        cache: dict[int, dict[int, int]] = {}
        hit = 0
        for (s, t), path in zip(pairs, self.predict(pairs)):
            if s not in cache:
                cache[s] = bfs(self.graph_, s)
            hit += len(path) - 1 == cache[s][t]
        return hit / len(pairs)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"GridRouter({args})"
