"""Seeded instance generators."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InfeasibleParams
from .grid import GridGraph, Point, build_graph, count_inner_holes


@dataclass(frozen=True)
class Rect:
    x0: int
    y0: int
    x1: int  # inclusive
    y1: int

    def points(self) -> set[Point]:
        return {(x, y) for x in range(self.x0, self.x1 + 1) for y in range(self.y0, self.y1 + 1)}

    def near(self, other: Rect, gap: int) -> bool:
        return not (
            self.x1 + gap < other.x0
            or other.x1 + gap < self.x0
            or self.y1 + gap < other.y0
            or other.y1 + gap < self.y0
        )


def random_holes(
    n: int = 1000,
    k: int = 4,
    seed: int = 0,
    max_side: int | None = None,
    aspect: float = 1.0,
    tries: int = 2000,
) -> list[Point]:
    """Rectangle of about ``n`` points minus ``k`` non-touching rectangular holes.

    Holes keep at least one free row or column between each other and the
    outer border, so each is its own inner hole.
    """
    if n < 1 or k < 0:
        raise InfeasibleParams("n must be positive and k non-negative")
    rng = random.Random(seed)
    h = max(1, round(math.sqrt(n / aspect)))
    w = max(1, round(n / h))
    if k:
        # grow the box so the holes do not eat the node budget
        scale = 1.0
        while True:
            side = max_side or max(1, int(math.sqrt(w * h / (6 * k))))
            removed_est = k * ((side + 1) / 2) ** 2
            if w * h - removed_est >= n or scale > 3:
                break
            scale *= 1.05
            h = max(1, round(math.sqrt(n * scale / aspect)))
            w = max(1, round(n * scale / h))
    else:
        side = 1
    holes: list[Rect] = []
    for _ in range(tries):
        if len(holes) == k:
            break
        hw = rng.randint(1, side)
        hh = rng.randint(1, side)
        if w - hw - 2 < 1 or h - hh - 2 < 1:
            continue
        x0 = rng.randint(1, w - hw - 1)
        y0 = rng.randint(1, h - hh - 1)
        r = Rect(x0, y0, x0 + hw - 1, y0 + hh - 1)
        if any(r.near(o, 1) for o in holes):
            continue
        holes.append(r)
    if len(holes) < k:
        raise InfeasibleParams(f"could only place {len(holes)} of {k} holes in a {w}x{h} box")
    missing = set().union(*(r.points() for r in holes)) if holes else set()
    return [(x, y) for y in range(h) for x in range(w) if (x, y) not in missing]


def corridor(length: int = 20, width: int = 1, turns: int = 0, seed: int = 0) -> list[Point]:
    """Serpentine corridor of the given width.

    With ``turns == 0`` this is a straight ``length x width`` strip.  Each turn
    adds a U-bend; consecutive legs are separated by one empty row.
    """
    if length < 1 or width < 1 or turns < 0:
        raise InfeasibleParams("corridor sizes must be positive")
    pts: set[Point] = set()
    pitch = width + 1
    for leg in range(turns + 1):
        y0 = leg * pitch
        for x in range(length):
            for dy in range(width):
                pts.add((x, y0 + dy))
        if leg < turns:
            x_bend = length - 1 if leg % 2 == 0 else 0
            for dy in range(pitch + width):
                for dx in range(width):
                    xx = x_bend - dx if leg % 2 == 0 else x_bend + dx
                    pts.add((xx, y0 + dy))
    return sorted(pts, key=lambda p: (p[1], p[0]))


def instance(points: list[Point]) -> GridGraph:
    return build_graph(points)


def check_holes(points: list[Point], k: int) -> bool:
    return count_inner_holes(build_graph(points)) == k
