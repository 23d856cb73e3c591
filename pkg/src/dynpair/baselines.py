"""Reference backends: brute-force recomputation and the neighbor heuristic."""

from __future__ import annotations

import numpy as np

from .core import ClosestPairStructure, PairReport, _scalar, brute_force_min, first_min


class BruteForce(ClosestPairStructure):
    """Stores the live set only; every query scans all C(n, 2) pairs."""

    name = "bf"

    def _insert(self, x):
        pass

    def _delete(self, x):
        pass

    def _invalidate(self, a, b):
        pass

    def _closest_pair(self):
        return brute_force_min(self.oracle, self.live.array, count=True)


class _NeighborTable:
    """Per-handle (neighbor, distance) arrays, grown on demand."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.nbr = np.full(16, -1, dtype=np.intp)
        self.dist = np.full(16, oracle.infinity, dtype=oracle.dtype)

    def ensure(self, h: int) -> None:
        if h >= len(self.nbr):
            cap = max(2 * len(self.nbr), h + 1)
            nbr = np.full(cap, -1, dtype=np.intp)
            dist = np.full(cap, self.oracle.infinity, dtype=self.oracle.dtype)
            nbr[: len(self.nbr)] = self.nbr
            dist[: len(self.dist)] = self.dist
            self.nbr, self.dist = nbr, dist

    def rescan(self, y: int, others: np.ndarray) -> None:
        """Point ``y`` at its nearest neighbor among ``others`` (full scan)."""
        if len(others) == 0:
            self.nbr[y] = -1
            self.dist[y] = self.oracle.infinity
            return
        ds = self.oracle.many(y, others)
        j = first_min(ds)
        self.nbr[y] = others[j]
        self.dist[y] = ds[j]

    def best(self, live: np.ndarray) -> PairReport:
        ds = self.dist[live]
        j = first_min(ds)
        y = int(live[j])
        if self.nbr[y] < 0:
            # everything is at infinity; never report the sentinel as a partner
            real = np.flatnonzero(self.nbr[live] >= 0)
            if len(real):
                y = int(live[real[0]])
                return PairReport(y, int(self.nbr[y]), _scalar(self.dist[y]))
            return PairReport(int(live[0]), int(live[1]), self.oracle.infinity)
        return PairReport(y, int(self.nbr[y]), _scalar(ds[j]))


class NeighborHeuristic(ClosestPairStructure):
    """Each live object remembers its true nearest neighbor.

    Insert is one scan plus strict-improvement updates of the others.  Delete
    rescans (in ascending handle order) every object whose neighbor was the
    deleted one, so a hub of many objects costs Θ(n²).
    """

    name = "nh"

    def __init__(self, oracle):
        super().__init__(oracle)
        self.table = _NeighborTable(oracle)
        self.rescans = 0

    def _insert(self, x):
        t = self.table
        t.ensure(x)
        others = self.live.without(x)
        if len(others) == 0:
            t.nbr[x] = -1
            t.dist[x] = self.oracle.infinity
            return
        ds = self.oracle.many(x, others)
        j = first_min(ds)
        t.nbr[x] = others[j]
        t.dist[x] = ds[j]
        better = ds < t.dist[others]
        if better.any():
            upd = others[better]
            t.nbr[upd] = x
            t.dist[upd] = ds[better]

    def _rescan_owners_of(self, x, owners):
        for y in owners.tolist():
            self.rescans += 1
            self.table.rescan(y, self.live.without(y))

    def _delete(self, x):
        live = self.live.array
        owners = live[self.table.nbr[live] == x]
        self._rescan_owners_of(x, owners)

    def _invalidate(self, a, b):
        for y, z in ((a, b), (b, a)):
            if self.table.nbr[y] == z:
                self.rescans += 1
                self.table.rescan(y, self.live.without(y))

    def _closest_pair(self):
        return self.table.best(self.live.array)

    def entries(self) -> dict[int, tuple[int, object]]:
        return {h: (int(self.table.nbr[h]), _scalar(self.table.dist[h]))
                for h in self.live}
