"""Deterministic synthetic point sets for benchmarks and tests."""
from __future__ import annotations

import numpy as np

from .geometry import Extents, Point2D
from .sources import PointCollection

DEFAULT_EXTENTS = Extents(Point2D(0.0, 0.0), Point2D(1000.0, 1000.0))


def uniform_points(n: int, extents: Extents = DEFAULT_EXTENTS, seed: int = 0) -> PointCollection:
    """n points drawn uniformly over extents (PCG64, fixed by seed)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(
        (extents.min.x, extents.min.y), (extents.max.x, extents.max.y), size=(n, 2)
    )
    return PointCollection(pts)


def gaussian_points(n: int, extents: Extents = DEFAULT_EXTENTS, seed: int = 0) -> PointCollection:
    """n points from an axis-aligned normal centered in extents.

    Sigma is one sixth of each extent dimension; samples are not clipped,
    so a few points usually land outside the nominal extents. The index
    always grids over the true bounding box, so that is fine.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    center = extents.center
    pts = rng.normal(
        (center.x, center.y), (extents.width / 6.0, extents.height / 6.0), size=(n, 2)
    )
    return PointCollection(pts)
