"""Linear-space conga line structure.

The live set is partitioned into at most ~log2(n) subsets.  Each subset
owns a graph built as a single nearest-neighbor path that alternates
between the subset and the whole set; some stored edge always joins a
closest pair, so a query is a scan over the edges.  Updates create new
subsets (the inserted object, or the objects whose out-edge pointed at a
deleted one) and merge the two most equal-sized subsets while there are
too many.  If the graphs accumulate 2n edges everything is rebuilt as one
path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .core import ClosestPairStructure, PairReport, _scalar, first_min


def default_k_limit(n: int) -> int:
    """ceil(log2 n), floored at 1."""
    if n <= 2:
        return 1
    return math.ceil(math.log2(n))


@dataclass
class Subset:
    members: set
    edges: list = field(default_factory=list)  # (src, dst, dist) in path order
    _best: Optional[tuple] = field(default=None, repr=False)

    def best_edge(self) -> Optional[tuple]:
        if self._best is None and self.edges:
            best = self.edges[0]
            for e in self.edges:
                if e[2] < best[2]:
                    best = e
            self._best = best
        return self._best

    def drop_edges(self, pred) -> list:
        """Remove edges satisfying ``pred``; return the removed ones."""
        kept, gone = [], []
        for e in self.edges:
            (gone if pred(e) else kept).append(e)
        if gone:
            self.edges = kept
            self._best = None
        return gone


def create_path(oracle, members: Iterable[int], universe: np.ndarray) -> Subset:
    """Build the alternating nearest-neighbor path for ``members``.

    Starts at the lowest-handle member.  From a vertex inside the subset the
    next vertex is its nearest neighbor among all unvisited objects of the
    universe; from a vertex outside it, the nearest unvisited member.  Stops
    when the relevant candidate set is empty.  Ties go to the lowest handle.
    """
    members = sorted(set(int(m) for m in members))
    if not members:
        raise ValueError("cannot build a path for an empty subset")
    universe = np.asarray(universe, dtype=np.intp)
    pos = np.searchsorted(universe, members)
    if (pos >= len(universe)).any() or (universe[np.minimum(pos, len(universe) - 1)] != members).any():
        raise ValueError("subset members must belong to the universe")
    in_s = np.zeros(len(universe), dtype=bool)
    in_s[pos] = True
    in_p = np.zeros(len(universe), dtype=bool)
    cur = int(pos[0])
    in_p[cur] = True
    edges = []
    while True:
        mask = ~in_p if in_s[cur] else (in_s & ~in_p)
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            break
        ds = oracle.many(int(universe[cur]), universe[idx])
        j = first_min(ds)
        nxt = int(idx[j])
        edges.append((int(universe[cur]), int(universe[nxt]), _scalar(ds[j])))
        in_p[nxt] = True
        cur = nxt
    return Subset(set(members), edges)


def pick_merge_pair(sizes: list[int]) -> tuple[int, int]:
    """Indices (i, j) of the two subsets whose larger/smaller size ratio is least.

    Ratios are compared exactly by cross-multiplication; ties go to the
    lexicographically first pair.
    """
    best = None
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            lo, hi = sorted((sizes[i], sizes[j]))
            if best is None or hi * best[0] < best[1] * lo:
                best = (lo, hi, i, j)
    return best[2], best[3]


class CongaLine(ClosestPairStructure):
    name = "cl"
    merging = True

    def __init__(self, oracle, k_limit: Optional[Callable[[int], int]] = None):
        super().__init__(oracle)
        self.subsets: list[Subset] = []
        self.owner: dict[int, Subset] = {}
        self.k_limit_fn = k_limit or default_k_limit
        self.rebuilds = 0
        self.merges = 0
        self.last_movers: list[int] = []

    # -- bookkeeping --------------------------------------------------------

    @property
    def k_limit(self) -> int:
        return self.k_limit_fn(len(self.live))

    @property
    def total_edges(self) -> int:
        return sum(len(s.edges) for s in self.subsets)

    def _add_subset(self, members) -> Subset:
        s = create_path(self.oracle, members, self.live.array)
        self.subsets.append(s)
        for m in s.members:
            self.owner[m] = s
        return s

    def _detach(self, y: int) -> None:
        s = self.owner.pop(y)
        s.members.discard(y)

    def _prune(self) -> None:
        self.subsets = [s for s in self.subsets if s.members]

    def _merge_down(self) -> None:
        limit = self.k_limit
        while len(self.subsets) > limit:
            i, j = pick_merge_pair([len(s.members) for s in self.subsets])
            merged = self.subsets[i].members | self.subsets[j].members
            self.subsets = [s for k, s in enumerate(self.subsets) if k not in (i, j)]
            self._add_subset(merged)
            self.merges += 1

    def _rebuild(self, count: bool = True) -> None:
        self.subsets = []
        self.owner = {}
        if len(self.live):
            self._add_subset(self.live.array.tolist())
        self.rebuilds += count

    def _settle(self) -> None:
        if self.merging:
            self._merge_down()
        if self.total_edges and self.total_edges >= 2 * len(self.live):
            self._rebuild()

    # -- operations ---------------------------------------------------------

    def build(self, handles):
        """One subset holding everything, one path over it."""
        for h in handles:
            self._admit(h)
        self._rebuild(count=False)

    def _insert(self, x):
        self._add_subset([x])
        self._settle()

    def _move_to_new_subset(self, movers) -> None:
        for y in movers:
            self._detach(y)
        self._prune()
        if movers:
            self._add_subset(movers)

    def _delete(self, x):
        movers = set()
        for s in self.subsets:
            for e in s.drop_edges(lambda e: e[0] == x or e[1] == x):
                if e[1] == x:
                    movers.add(e[0])
        self._detach(x)
        movers.discard(x)
        self.last_movers = sorted(movers)
        self._move_to_new_subset(self.last_movers)
        self._settle()

    def _invalidate(self, a, b):
        for s in self.subsets:
            s.drop_edges(lambda e: (e[0] == a and e[1] == b) or (e[0] == b and e[1] == a))
        self._move_to_new_subset([a, b])
        self._settle()

    def _closest_pair(self):
        best = None
        for s in self.subsets:
            e = s.best_edge()
            if e is not None and (best is None or e[2] < best[2]):
                best = e
        if best is None:
            raise AssertionError("conga structure holds no edges for a set of size >= 2")
        return PairReport(*best)

    # -- inspection ---------------------------------------------------------

    def dump(self) -> str:
        """Line-oriented dump: one ``subset`` line per subset, then its edges."""
        lines = [f"{self.name} n={len(self.live)} subsets={len(self.subsets)} edges={self.total_edges}"]
        for i, s in enumerate(self.subsets):
            lines.append(f"subset {i} members={' '.join(map(str, sorted(s.members)))}")
            for u, v, d in s.edges:
                lines.append(f"  edge {u} -> {v} {d!r}")
        return "\n".join(lines)

