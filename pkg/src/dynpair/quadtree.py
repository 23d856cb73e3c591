"""Quadratic-space closest pair structure over a hierarchy of block minima.

Live objects occupy dense slots 0..n-1.  Level 0 is the distance matrix
between slots (infinite on the diagonal).  A cell (i, k) at level j holds
the minimum distance between the slot blocks [i*2^j, (i+1)*2^j) and
[k*2^j, (k+1)*2^j), computed from its four children at level j-1, together
with the slot pair attaining it.  The closest pair is the single cell at
level ceil(log2 n).

Insert takes slot n and refreshes one block row per level; delete moves
the last slot into the hole, so two rows per level change.  Changing one
distance refreshes one cell per level.  External handles never change;
only the handle<->slot maps do.
"""

from __future__ import annotations

import math

import numpy as np

from .core import CapacityError, ClosestPairStructure, PairReport, _scalar


def levels_for(n: int) -> int:
    return 0 if n <= 1 else math.ceil(math.log2(n))


def _blocks(n: int, j: int) -> int:
    return -(-n // (1 << j))


class QuadTree(ClosestPairStructure):
    name = "qt"

    def __init__(self, oracle, max_capacity: int = 4096):
        super().__init__(oracle)
        self.max_capacity = max_capacity
        self.handle_of: list[int] = []
        self.slot_of: dict[int, int] = {}
        self.cap = 0
        self.vals: list[np.ndarray] = []
        self.argi: list[np.ndarray] = []
        self.argk: list[np.ndarray] = []
        self.last_touched = 0
        self.touched = 0
        self._grow(4)

    # -- storage ------------------------------------------------------------

    def _grow(self, cap: int) -> None:
        inf, dt = self.oracle.infinity, self.oracle.dtype
        nlev = int(math.log2(cap)) + 1
        vals, argi, argk = [], [], []
        for j in range(nlev):
            size = cap >> j
            v = np.full((size, size), inf, dtype=dt)
            ai = np.full((size, size), -1, dtype=np.int32)
            ak = np.full((size, size), -1, dtype=np.int32)
            if j < len(self.vals):
                old = self.vals[j].shape[0]
                v[:old, :old] = self.vals[j]
                ai[:old, :old] = self.argi[j]
                ak[:old, :old] = self.argk[j]
            vals.append(v)
            argi.append(ai)
            argk.append(ak)
        self.vals, self.argi, self.argk, self.cap = vals, argi, argk, cap

    @property
    def n(self) -> int:
        return len(self.handle_of)

    def cell_count(self) -> int:
        """Distinct values maintained for the current n (base pairs plus i <= k cells above)."""
        n = self.n
        total = n * (n - 1) // 2
        for j in range(1, levels_for(n) + 1):
            m = _blocks(n, j)
            total += m * (m + 1) // 2
        return total

    # -- recomputation --------------------------------------------------------

    def _recompute(self, j: int, b: int, ks: np.ndarray) -> None:
        """Refresh cells (b, k) for k in ks at level j from level j-1."""
        A = self.vals[j - 1]
        r0, r1 = 2 * b, 2 * b + 1
        c0, c1 = 2 * ks, 2 * ks + 1
        stack = np.stack((A[r0, c0], A[r1, c0], A[r0, c1], A[r1, c1]))
        w = np.argmin(stack, axis=0)
        cols = np.arange(len(ks))
        v = stack[w, cols]
        rows = np.where((w & 1) == 0, r0, r1)
        cc = np.where(w < 2, c0, c1)
        if j == 1:
            ai, ak = rows, cc
        else:
            ai = self.argi[j - 1][rows, cc]
            ak = self.argk[j - 1][rows, cc]
        self.vals[j][b, ks] = v
        self.vals[j][ks, b] = v
        self.argi[j][b, ks] = ai
        self.argi[j][ks, b] = ai
        self.argk[j][b, ks] = ak
        self.argk[j][ks, b] = ak
        self.touched += len(ks)

    def _refresh_rows(self, slots, n_eff: int) -> None:
        for j in range(1, levels_for(n_eff) + 1):
            ks = np.arange(_blocks(n_eff, j))
            for b in sorted({s >> j for s in slots}):
                self._recompute(j, b, ks)

    # -- operations ---------------------------------------------------------

    def _insert(self, x):
        p = self.n
        if p + 1 > self.max_capacity:
            self.live.remove(x)
            raise CapacityError(f"quadtree capacity {self.max_capacity} exceeded")
        if p + 1 > self.cap:
            self._grow(min(2 * self.cap, 1 << math.ceil(math.log2(self.max_capacity))))
        base = self.vals[0]
        if p:
            try:
                row = self.oracle.many(x, self.handle_of)
            except Exception:
                self.live.remove(x)
                raise
            base[p, :p] = row
            base[:p, p] = row
        base[p, p] = self.oracle.infinity
        self.handle_of.append(x)
        self.slot_of[x] = p
        self.touched = 0
        self._refresh_rows([p], p + 1)
        self.last_touched = self.touched

    def insert(self, x) -> None:
        # the base class would try to remove x twice on failure
        x = self._admit(x)
        self._insert(x)

    def _delete(self, x):
        n = self.n
        i = self.slot_of.pop(x)
        last = n - 1
        base = self.vals[0]
        inf = self.oracle.infinity
        if i != last:
            y = self.handle_of[last]
            base[i, :] = base[last, :]
            base[:, i] = base[:, last]
            base[i, i] = inf
            self.handle_of[i] = y
            self.slot_of[y] = i
        base[last, :] = inf
        base[:, last] = inf
        self.handle_of.pop()
        self.touched = 0
        self._refresh_rows([i, last], n)
        self.last_touched = self.touched

    def update_distance(self, a, b) -> None:
        """Re-read d(a, b) from the oracle and refresh one cell per level."""
        a, b = self._require_live(a), self._require_live(b)
        if a == b:
            raise ValueError("update_distance needs two distinct handles")
        sa, sb = self.slot_of[a], self.slot_of[b]
        d = self.oracle(a, b)
        self.vals[0][sa, sb] = d
        self.vals[0][sb, sa] = d
        self.touched = 0
        for j in range(1, levels_for(self.n) + 1):
            self._recompute(j, sa >> j, np.array([sb >> j]))
        self.last_touched = self.touched

    def _invalidate(self, a, b):
        self.update_distance(a, b)

    def _closest_pair(self):
        L = levels_for(self.n)
        v = self.vals[L][0, 0]
        i, k = int(self.argi[L][0, 0]), int(self.argk[L][0, 0])
        if not (0 <= i < self.n and 0 <= k < self.n) or i == k:
            # every live pair is infinite; the argmin may name padding
            i, k = 0, 1
        return PairReport(self.handle_of[i], self.handle_of[k], _scalar(v))

    # -- inspection ---------------------------------------------------------

    def audit(self) -> list[str]:
        """Check every live cell against its children and against brute force.

        Returns a list of human-readable violations (empty when consistent).
        """
        problems = []
        n = self.n
        base = self.vals[0]
        for s in range(n):
            if base[s, s] != self.oracle.infinity:
                problems.append(f"base diagonal {s} is not infinite")
        for j in range(1, levels_for(n) + 1):
            m, mc = _blocks(n, j), _blocks(n, j - 1)
            size = 1 << j
            for i in range(m):
                for k in range(i, m):
                    kids = [self.vals[j - 1][ci, ck]
                            for ci in (2 * i, 2 * i + 1) for ck in (2 * k, 2 * k + 1)
                            if ci < mc and ck < mc]
                    want = min(kids) if kids else self.oracle.infinity
                    got = self.vals[j][i, k]
                    if got != want or self.vals[j][k, i] != got:
                        problems.append(f"cell ({i},{j},{k}) = {got!r}, children give {want!r}")
                    block = base[i * size:min((i + 1) * size, n), k * size:min((k + 1) * size, n)]
                    direct = block.min() if block.size else self.oracle.infinity
                    if direct != got:
                        problems.append(f"cell ({i},{j},{k}) = {got!r}, direct minimum {direct!r}")
                    ai, ak = int(self.argi[j][i, k]), int(self.argk[j][i, k])
                    if ai >= 0 and ai != ak and base[ai, ak] != got:
                        problems.append(f"cell ({i},{j},{k}) argmin ({ai},{ak}) disagrees")
        return problems
