"""Agglomerative clustering driven by a dynamic closest pair structure.

Each step takes the closest pair of live clusters, deletes both and inserts
the merged cluster.  Two ways to define the merged cluster's distances:

* recurrence linkages (single, complete, average, weighted, median,
  centroid, ward) update a cluster-distance matrix with the Lance-Williams
  formula from d(k, i), d(k, j), d(i, j) and the cluster sizes;
* ``representative`` linkage builds a new object from the two clusters'
  representatives (by default the size-weighted centroid) and appends it to
  the oracle, which must then support ``add``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np

from ..core import DistanceOracle
from ._common import handles_of, open_backend

RECURRENCE_KINDS = ("single", "complete", "average", "weighted", "median", "centroid", "ward")


@dataclass(frozen=True)
class LinkageRule:
    kind: str = "average"
    combine: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in RECURRENCE_KINDS + ("representative",):
            raise ValueError(f"unknown linkage {self.kind!r}")

    @property
    def is_recurrence(self) -> bool:
        return self.kind != "representative"

    def update(self, d_ki, d_kj, d_ij, ni, nj, nk):
        """d(k, i+j) for arrays of other clusters k."""
        kind = self.kind
        if kind == "single":
            return np.minimum(d_ki, d_kj)
        if kind == "complete":
            return np.maximum(d_ki, d_kj)
        if kind == "average":
            return (ni * d_ki + nj * d_kj) / (ni + nj)
        if kind == "weighted":
            return 0.5 * d_ki + 0.5 * d_kj
        if kind == "median":
            return 0.5 * d_ki + 0.5 * d_kj - 0.25 * d_ij
        if kind == "centroid":
            s = ni + nj
            return (ni * d_ki + nj * d_kj) / s - (ni * nj / (s * s)) * d_ij
        if kind == "ward":
            t = ni + nj + nk
            return ((ni + nk) * d_ki + (nj + nk) * d_kj - nk * d_ij) / t
        raise ValueError(f"{kind} linkage has no recurrence")


def centroid_combine(p, q, n_p: int, n_q: int):
    return (n_p * np.asarray(p) + n_q * np.asarray(q)) / (n_p + n_q)


@dataclass
class Dendrogram:
    """Merge list; leaves are 0..n-1 and merge t creates cluster n+t."""

    n: int
    merges: list = field(default_factory=list)  # (left, right, distance, new_id)
    stats: dict = field(default_factory=dict)

    def heights(self) -> list:
        return [m[2] for m in self.merges]

    def validate(self) -> None:
        n = self.n
        if n and len(self.merges) != n - 1:
            raise ValueError(f"expected {n - 1} merges, got {len(self.merges)}")
        seen, alive = set(), set(range(n))
        for t, (l, r, _, c) in enumerate(self.merges):
            if c != n + t:
                raise ValueError(f"merge {t} creates id {c}, expected {n + t}")
            for child in (l, r):
                if child in seen or child not in alive:
                    raise ValueError(f"cluster {child} merged twice or before it exists")
                seen.add(child)
                alive.discard(child)
            alive.add(c)

    def sizes(self) -> dict:
        size = {i: 1 for i in range(self.n)}
        for l, r, _, c in self.merges:
            size[c] = size[l] + size[r]
        return size

    def to_linkage_matrix(self) -> np.ndarray:
        """SciPy-style (n-1) x 4 array: left, right, distance, size."""
        size = self.sizes()
        return np.array([[l, r, d, size[c]] for l, r, d, c in self.merges], dtype=float).reshape(-1, 4)

    def to_newick(self, labels: Optional[Sequence[str]] = None) -> str:
        if self.n == 0:
            return ";"
        labels = [str(i) for i in range(self.n)] if labels is None else list(labels)
        height = {i: 0.0 for i in range(self.n)}
        text = {i: labels[i] for i in range(self.n)}
        for l, r, d, c in self.merges:
            height[c] = float(d)
            text[c] = f"({text[l]}:{float(d) - height[l]!r},{text[r]}:{float(d) - height[r]!r})"
        root = self.merges[-1][3] if self.merges else 0
        return text[root] + ";"

    def write_csv(self, fh: TextIO) -> None:
        size = self.sizes()
        fh.write("step,left,right,distance,new_id,size\n")
        for t, (l, r, d, c) in enumerate(self.merges):
            fh.write(f"{t},{l},{r},{d!r},{c},{size[c]}\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


class ClusterDistances(DistanceOracle):
    """Current inter-cluster distances; handle = cluster id (leaves 0..n-1)."""

    def __init__(self, n: int):
        super().__init__()
        size = max(2 * n - 1, 1)
        self.matrix = np.full((size, size), np.inf)

    def _distances(self, a, bs):
        return self.matrix[a, bs]


def _as_rule(linkage, combine) -> LinkageRule:
    if isinstance(linkage, LinkageRule):
        return linkage
    return LinkageRule(linkage, combine)


def agglomerate(points, oracle: DistanceOracle,
                linkage: Union[str, LinkageRule] = "average",
                backend="fp", combine: Optional[Callable] = None,
                **backend_kwargs) -> Dendrogram:
    """Cluster the objects ``points`` (handles into ``oracle``) bottom-up.

    ``backend`` is a short name or a structure class.  The returned
    dendrogram's ``stats`` report evaluations seen by the structure's oracle
    and the peak number of live clusters.
    """
    rule = _as_rule(linkage, combine)
    leaves = handles_of(points)
    if rule.is_recurrence:
        if not oracle.numeric:
            raise ValueError(f"{rule.kind} linkage needs numeric distances")
        return _agglomerate_recurrence(leaves, oracle, rule, backend, backend_kwargs)
    return _agglomerate_representative(leaves, oracle, rule, backend, backend_kwargs)


def _agglomerate_recurrence(leaves, oracle, rule, backend, backend_kwargs) -> Dendrogram:
    n = len(leaves)
    cd = ClusterDistances(n)
    M = cd.matrix
    pts = np.asarray(leaves, dtype=np.intp)
    for i in range(n - 1):
        row = oracle.many(int(pts[i]), pts[i + 1:])
        M[i, i + 1:n] = row
        M[i + 1:n, i] = row
    sizes = np.zeros(max(2 * n - 1, 1))
    sizes[:n] = 1
    struct = open_backend(backend, cd, backend_kwargs)
    struct.build(range(n))
    dendro = Dendrogram(n)
    for t in range(n - 1):
        rep = struct.closest_pair()
        i, j = sorted((rep.a, rep.b))
        c = n + t
        struct.delete(i)
        struct.delete(j)
        others = struct.live.array
        d_ij = M[i, j]
        row = rule.update(M[i, others], M[j, others], d_ij, sizes[i], sizes[j], sizes[others])
        M[c, others] = row
        M[others, c] = row
        sizes[c] = sizes[i] + sizes[j]
        struct.insert(c)
        dendro.merges.append((i, j, rep.d, c))
    dendro.stats = {"oracle_evals": cd.evals, "peak_objects": struct.peak_size}
    return dendro


def _agglomerate_representative(leaves, oracle, rule, backend, backend_kwargs) -> Dendrogram:
    if not hasattr(oracle, "add"):
        raise ValueError("representative linkage needs an oracle that can add objects")
    combine = rule.combine or centroid_combine
    n = len(leaves)
    struct = open_backend(backend, oracle, backend_kwargs)
    cluster_of = {h: i for i, h in enumerate(leaves)}
    size = {h: 1 for h in leaves}
    evals0 = oracle.evals
    struct.build(leaves)
    dendro = Dendrogram(n)
    for t in range(n - 1):
        rep = struct.closest_pair()
        a, b = sorted((rep.a, rep.b), key=lambda h: cluster_of[h])
        struct.delete(a)
        struct.delete(b)
        h = oracle.add(combine(oracle.points[a], oracle.points[b], size[a], size[b]))
        size[h] = size[a] + size[b]
        cluster_of[h] = n + t
        struct.insert(h)
        dendro.merges.append((cluster_of[a], cluster_of[b], rep.d, n + t))
    dendro.stats = {"oracle_evals": oracle.evals - evals0, "peak_objects": struct.peak_size}
    return dendro
