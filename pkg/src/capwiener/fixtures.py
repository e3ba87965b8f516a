"""Built-in compact sets used by the experiments and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .geometry import BallUnion, CantorIterate, CompactSet, IntervalUnion, PointSet


def ring(radius: float = 1.0, count: int = 16, ball_radius: float = 0.04) -> BallUnion:
    """Small discs of radius ``ball_radius`` centred on a circle."""
    th = 2 * np.pi * np.arange(count) / count
    centers = radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    return BallUnion(centers, np.full(count, ball_radius))


def _catalog() -> dict:
    cat = {
        "interval": (IntervalUnion([(-1.0, 1.0)]), "[-1, 1]"),
        "two-intervals": (IntervalUnion([(-2.0, -1.0), (1.0, 2.0)]), "[-2, -1] ∪ [1, 2]"),
        "point": (PointSet([[0.0]]), "{0}"),
        "ball": (BallUnion([[0.0, 0.0]], [1.0]), "closed unit disc in R^2"),
        "ring": (ring(), "16 discs of radius 0.04 on the unit circle in R^2"),
    }
    for d in range(1, 5):
        cat[f"cantor-{d}"] = (CantorIterate(-1.0, 1.0, 1.0 / 3.0, d),
                              f"depth-{d} middle-thirds iterate of [-1, 1] ({2 ** d} intervals)")
    return cat


FIXTURES = _catalog()


def fixture(name: str) -> CompactSet:
    try:
        return FIXTURES[name][0]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None


def describe(name: str) -> str:
    return FIXTURES[name][1]


def catalog_text() -> str:
    lines = []
    for name in sorted(FIXTURES):
        F, text = FIXTURES[name]
        lines.append(f"{name:14s} N={F.dim}  {F.variant:20s} {text}")
    return "\n".join(lines)


def fixture_scale(F: CompactSet) -> float:
    """Half the diameter, or 1 for sets of diameter 0."""
    d = F.diameter
    return d / 2 if d > 0 and math.isfinite(d) else 1.0
