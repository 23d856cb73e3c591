"""Simplified conga structures: MultiConga and FastPair."""

from __future__ import annotations

from .baselines import _NeighborTable
from .conga import CongaLine, create_path
from .core import ClosestPairStructure, _scalar


class MultiConga(CongaLine):
    """Conga line that never merges subsets.

    Inserts add a singleton subset (one edge to the nearest neighbor); deletes
    gather the in-neighbors of the deleted object into one new subset with
    its own path.  The 2n-edge rebuild guard is kept.
    """

    name = "mc"
    merging = False


class FastPair(ClosestPairStructure):
    """One stored (neighbor, distance) entry per live object.

    The entries are a witness set, not true nearest neighbors: an insert
    only computes the new object's own entry, and a delete rescans just the
    objects whose entry named the deleted one.  Bulk construction lays a
    single nearest-neighbor chain so in-degrees start at most one; the chain
    tail holds an entry at infinity with neighbor -1.
    """

    name = "fp"

    def __init__(self, oracle):
        super().__init__(oracle)
        self.table = _NeighborTable(oracle)
        self.rescans = 0

    def build(self, handles):
        if len(self.live):
            raise ValueError("FastPair.build expects an empty structure")
        for h in handles:
            self.table.ensure(self._admit(h))
        if not len(self.live):
            return
        path = create_path(self.oracle, self.live.array.tolist(), self.live.array)
        t = self.table
        for u, v, d in path.edges:
            t.nbr[u] = v
            t.dist[u] = d
        tail = path.edges[-1][1] if path.edges else int(self.live.array[0])
        t.nbr[tail] = -1
        t.dist[tail] = self.oracle.infinity

    def _insert(self, x):
        self.table.ensure(x)
        self.table.rescan(x, self.live.without(x))

    def _delete(self, x):
        live = self.live.array
        for y in live[self.table.nbr[live] == x].tolist():
            self.rescans += 1
            self.table.rescan(y, self.live.without(y))

    def _invalidate(self, a, b):
        # a raised distance only breaks entries that name it
        for y, z in ((a, b), (b, a)):
            if self.table.nbr[y] == z:
                self.rescans += 1
                self.table.rescan(y, self.live.without(y))

    def _closest_pair(self):
        return self.table.best(self.live.array)

    def entries(self) -> dict[int, tuple[int, object]]:
        return {h: (int(self.table.nbr[h]), _scalar(self.table.dist[h]))
                for h in self.live}

    def dump(self) -> str:
        lines = [f"fp n={len(self.live)} entries={len(self.live)}"]
        for h, (v, d) in self.entries().items():
            lines.append(f"  edge {h} -> {v} {d!r}")
        return "\n".join(lines)
