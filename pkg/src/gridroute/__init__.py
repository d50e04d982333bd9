"""Exact compact routing on grid graphs with holes."""

from .decomposition import Decomposition, decompose, verify_decomposition
from .errors import GridRouteError
from .estimator import GridRouter
from .grid import GridGraph, GridPath, bfs, build_graph, count_inner_holes, detect_holes
from .hybrid import HybridParams, RoundLedger
from .landmarks import LandmarkGraph, RegionIndex, build_landmark_graph, mark_landmarks
from .routing import NodeLabel, Router, measure_sizes

__all__ = [
    "Decomposition",
    "GridGraph",
    "GridPath",
    "GridRouteError",
    "GridRouter",
    "HybridParams",
    "LandmarkGraph",
    "NodeLabel",
    "RegionIndex",
    "RoundLedger",
    "Router",
    "bfs",
    "build_graph",
    "build_landmark_graph",
    "count_inner_holes",
    "decompose",
    "detect_holes",
    "mark_landmarks",
    "measure_sizes",
    "verify_decomposition",
]
