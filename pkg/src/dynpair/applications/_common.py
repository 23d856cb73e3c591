from __future__ import annotations

import numpy as np

from ..core import DistanceOracle


def handles_of(points) -> list[int]:
    """Accept a count n (handles 0..n-1) or an explicit sequence of handles."""
    if isinstance(points, (int, np.integer)):
        return list(range(int(points)))
    return [int(h) for h in points]


def open_backend(backend, oracle, kwargs=None):
    from .. import make_backend
    return make_backend(backend, oracle, **(kwargs or {}))


class Overlay(DistanceOracle):
    """Same distances as ``base`` with a private counter and private infinite pairs."""

    def __init__(self, base: DistanceOracle):
        super().__init__()
        self.base = base
        self.numeric = base.numeric
        self.infinity = base.infinity

    def _distances(self, a, bs):
        return self.base.many(a, bs, count=False)
