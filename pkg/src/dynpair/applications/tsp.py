"""TSP construction heuristics on top of a dynamic closest pair structure.

``multifragment_tsp`` keeps the endpoints of path fragments as objects;
endpoints of the same fragment are at distance infinity, so the closest
pair is always the shortest edge that joins two fragments.

``cheapest_insertion_tsp`` keeps tour edges and uninserted sites as
objects.  The distance between an edge (u, v) and a site s is the length
increase d(u, s) + d(s, v) - d(u, v) of splicing s in; every other pair is
infinite.  The tour starts as the two-edge cycle on the closest pair of
sites.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from ..core import DistanceOracle
from ._common import Overlay, handles_of, open_backend


@dataclass
class Tour:
    order: list
    length: float
    insertions: list = field(default_factory=list)  # (site, undirected edge split) for cheapest insertion
    stats: dict = field(default_factory=dict)

    def edges(self) -> list:
        """Sorted multiset of undirected tour edges."""
        k = len(self.order)
        return sorted(tuple(sorted((self.order[i], self.order[(i + 1) % k]))) for i in range(k))

    def canonical(self) -> tuple:
        """Rotation/reflection-free form: start at the smallest handle, lexicographically smaller direction."""
        k = len(self.order)
        if k == 0:
            return ()
        s = self.order.index(min(self.order))
        fwd = tuple(self.order[(s + i) % k] for i in range(k))
        bwd = tuple(self.order[(s - i) % k] for i in range(k))
        return min(fwd, bwd)

    def validate(self, handles) -> None:
        if sorted(self.order) != sorted(handles):
            raise ValueError("tour is not a permutation of the input handles")

    def write_csv(self, fh: TextIO) -> None:
        fh.write("position,handle\n")
        for i, h in enumerate(self.order):
            fh.write(f"{i},{h}\n")
        fh.write(f"# length,{self.length!r}\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def tour_length(order, oracle: DistanceOracle) -> float:
    k = len(order)
    return float(sum(oracle.peek(order[i], order[(i + 1) % k]) for i in range(k)))


def _path_order(adj: dict, start: int) -> list:
    order, prev, cur = [start], None, start
    while True:
        nxt = [v for v in adj[cur] if v != prev]
        if not nxt or (len(order) == len(adj)):
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def multifragment_tsp(points, oracle: DistanceOracle, backend="fp", **backend_kwargs) -> Tour:
    pts = handles_of(points)
    n = len(pts)
    if n < 2:
        raise ValueError("multi-fragment tour needs at least 2 points")
    if not oracle.numeric:
        raise ValueError("tour lengths need numeric distances")
    ends = Overlay(oracle)
    struct = open_backend(backend, ends, backend_kwargs)
    struct.build(pts)
    other = {p: p for p in pts}
    degree = {p: 0 for p in pts}
    adj = {p: [] for p in pts}
    for step in range(n - 1):
        a, b, _ = struct.closest_pair()
        adj[a].append(b)
        adj[b].append(a)
        ea, eb = other[a], other[b]
        for p in (a, b):
            degree[p] += 1
            if degree[p] == 2:
                struct.delete(p)
        other[ea], other[eb] = eb, ea
        if step < n - 2:
            ends.set_infinite(ea, eb)
            struct.invalidate_pair(ea, eb)
    start = next(p for p in pts if degree[p] <= 1)
    order = _path_order(adj, start)
    tour = Tour(order, tour_length(order, oracle))
    tour.stats = {"oracle_evals": ends.evals, "peak_objects": struct.peak_size}
    return tour


def reference_multifragment(points, oracle: DistanceOracle) -> Tour:
    """Sort every edge, keep those joining endpoints of two different fragments."""
    pts = handles_of(points)
    n = len(pts)
    if n < 2:
        raise ValueError("multi-fragment tour needs at least 2 points")
    cand = []
    for i in range(n - 1):
        ds = oracle.many(pts[i], pts[i + 1:], count=False)
        cand.extend((float(d), pts[i], pts[i + 1 + k]) for k, d in enumerate(ds))
    cand.sort()
    parent = {p: p for p in pts}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    degree = {p: 0 for p in pts}
    adj = {p: [] for p in pts}
    added = 0
    for _, a, b in cand:
        if added == n - 1:
            break
        if degree[a] < 2 and degree[b] < 2 and find(a) != find(b):
            parent[find(a)] = find(b)
            degree[a] += 1
            degree[b] += 1
            adj[a].append(b)
            adj[b].append(a)
            added += 1
    start = next(p for p in pts if degree[p] <= 1)
    order = _path_order(adj, start)
    return Tour(order, tour_length(order, oracle))


class InsertionCosts(DistanceOracle):
    """Mixed set of sites (handles 0..n-1) and directed tour edges (handles >= n)."""

    def __init__(self, dist: np.ndarray):
        super().__init__()
        self.D = dist
        self.n = dist.shape[0]
        self.u = np.full(max(4, 2 * self.n), -1, dtype=np.intp)
        self.v = np.full(max(4, 2 * self.n), -1, dtype=np.intp)
        self.next_edge = self.n

    def new_edge(self, u: int, v: int) -> int:
        h = self.next_edge
        if h >= len(self.u):
            self.u = np.concatenate((self.u, np.full(len(self.u), -1, dtype=np.intp)))
            self.v = np.concatenate((self.v, np.full(len(self.v), -1, dtype=np.intp)))
        self.u[h], self.v[h] = u, v
        self.next_edge += 1
        return h

    def _distances(self, a, bs):
        out = np.full(len(bs), np.inf)
        D = self.D
        if a < self.n:
            mask = bs >= self.n
            e = bs[mask]
            u, v = self.u[e], self.v[e]
            out[mask] = D[u, a] + D[a, v] - D[u, v]
        else:
            mask = bs < self.n
            s = bs[mask]
            u, v = self.u[a], self.v[a]
            out[mask] = D[u, s] + D[s, v] - D[u, v]
        return out


def _site_matrix(pts, oracle) -> np.ndarray:
    n = len(pts)
    D = np.zeros((n, n))
    arr = np.asarray(pts, dtype=np.intp)
    for i in range(n - 1):
        row = oracle.many(int(arr[i]), arr[i + 1:])
        D[i, i + 1:] = row
        D[i + 1:, i] = row
    return D


def _cycle_order(succ: dict, start: int) -> list:
    order, cur = [start], succ[start]
    while cur != start:
        order.append(cur)
        cur = succ[cur]
    return order


def cheapest_insertion_tsp(points, oracle: DistanceOracle, backend="fp", **backend_kwargs) -> Tour:
    pts = handles_of(points)
    n = len(pts)
    if n < 3:
        raise ValueError("cheapest insertion needs at least 3 points")
    if not oracle.numeric:
        raise ValueError("tour lengths need numeric distances")
    D = _site_matrix(pts, oracle)
    costs = InsertionCosts(D)

    # starting pair: closest pair of sites, found with the same backend
    first = open_backend(backend, _SiteView(D), backend_kwargs)
    first.build(range(n))
    a, b, _ = first.closest_pair()
    evals = first.oracle.evals

    succ = {a: b, b: a}
    struct = open_backend(backend, costs, backend_kwargs)
    struct.build([s for s in range(n) if s not in (a, b)] + [costs.new_edge(a, b), costs.new_edge(b, a)])
    insertions = []
    for _ in range(n - 2):
        x, y, _ = struct.closest_pair()
        e, s = (x, y) if x >= n else (y, x)
        u, v = int(costs.u[e]), int(costs.v[e])
        struct.delete(e)
        struct.delete(s)
        struct.insert(costs.new_edge(u, s))
        struct.insert(costs.new_edge(s, v))
        succ[u], succ[s] = s, v
        insertions.append((pts[s], tuple(sorted((pts[u], pts[v])))))
    order = [pts[i] for i in _cycle_order(succ, a)]
    tour = Tour(order, tour_length(order, oracle), insertions)
    tour.stats = {"oracle_evals": evals + costs.evals,
                  "peak_objects": max(struct.peak_size, first.peak_size)}
    return tour


class _SiteView(DistanceOracle):
    """Site-to-site distances read from the precomputed matrix."""

    def __init__(self, D):
        super().__init__()
        self.D = D

    def _distances(self, a, bs):
        return self.D[a, bs]


def reference_cheapest_insertion(points, oracle: DistanceOracle) -> Tour:
    """Scan every (tour edge, site) pair at every step."""
    pts = handles_of(points)
    n = len(pts)
    if n < 3:
        raise ValueError("cheapest insertion needs at least 3 points")
    D = np.zeros((n, n))
    for i in range(n):
        D[i] = oracle.many(pts[i], pts, count=False)
    np.fill_diagonal(D, 0.0)
    masked = D + np.diag(np.full(n, np.inf))
    a, b = np.unravel_index(np.argmin(masked), masked.shape)
    a, b = int(min(a, b)), int(max(a, b))
    tour = [a, b]
    remaining = np.array([s for s in range(n) if s not in (a, b)], dtype=np.intp)
    insertions = []
    while len(remaining):
        u = np.array(tour)
        v = np.roll(u, -1)
        cost = D[u][:, remaining] + D[remaining][:, v].T - D[u, v][:, None]
        ei, si = np.unravel_index(np.argmin(cost), cost.shape)
        s = int(remaining[si])
        insertions.append((pts[s], tuple(sorted((pts[int(u[ei])], pts[int(v[ei])])))))
        tour.insert(int(ei) + 1, s)
        remaining = np.delete(remaining, si)
    order = [pts[i] for i in tour]
    return Tour(order, tour_length(order, oracle), insertions)
