"""Seeded instance generators for the benchmark matrix.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so an
``InstanceSpec`` always produces the same objects and the same distances.
Pairwise-hash oracles use the splitmix64 finalizer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, TextIO

import numpy as np

from .core import DistanceOracle, MatrixOracle, NegatedOracle, VectorOracle

KINDS = ("uniform_hypercube", "xor_fractal", "tree_leaves", "random_matrix", "pseudorandom_pairs")

_METRICS = {
    "uniform_hypercube": ("l2", "l1", "linf", "dot_product"),
    "xor_fractal": ("hamming", "l1"),
    "tree_leaves": ("tree",),
    "random_matrix": ("matrix",),
    "pseudorandom_pairs": ("hash",),
}


@dataclass(frozen=True)
class InstanceSpec:
    kind: str = "uniform_hypercube"
    n: int = 100
    dim: int = 20
    metric: Optional[str] = None
    negate: bool = False
    seed: int = 0
    levels: int = 3     # xor_fractal
    depth: int = 32     # tree_leaves

    @property
    def resolved_metric(self) -> str:
        return self.metric or _METRICS[self.kind][0]

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.resolved_metric not in _METRICS[self.kind]:
            raise ValueError(f"metric {self.resolved_metric!r} not available for {self.kind}")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.kind in ("uniform_hypercube", "xor_fractal") and self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.kind == "xor_fractal" and not 1 <= self.levels <= self.dim:
            raise ValueError("xor_fractal needs 1 <= levels <= dim")
        if self.kind == "tree_leaves" and not 1 <= self.depth <= 52:
            raise ValueError("tree depth must be in [1, 52]")


_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def splitmix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # wraparound is the point
        z = np.asarray(z, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def pair_uniform(seed: int, a, bs) -> np.ndarray:
    """Uniform [0, 1) value per unordered pair, from hash(seed, min, max)."""
    bs = np.asarray(bs, dtype=np.uint64)
    a = np.uint64(a)
    lo, hi = np.minimum(a, bs), np.maximum(a, bs)
    z = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ splitmix64(lo) ^ splitmix64(splitmix64(hi)))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class PairHashOracle(DistanceOracle):
    """Pseudorandom distances with no stored matrix."""

    def __init__(self, n: int, seed: int, memo: bool = False):
        super().__init__(memo=memo)
        self.n = n
        self.seed = seed

    def __len__(self):
        return self.n

    def _distances(self, a, bs):
        return pair_uniform(self.seed, a, bs)


class TreeLeafOracle(DistanceOracle):
    """Path length between leaves of a complete binary tree of the given depth.

    Leaves are depth-bit integers; the path climbs to the lowest common
    ancestor and back, 2 * (depth - common prefix length) edges.
    """

    def __init__(self, leaves, depth: int, memo: bool = False):
        super().__init__(memo=memo)
        self.leaves = np.asarray(leaves, dtype=np.uint64)
        self.depth = depth

    def __len__(self):
        return len(self.leaves)

    def _distances(self, a, bs):
        x = self.leaves[bs] ^ self.leaves[a]
        # frexp exponent is the bit length; exact for values below 2**53
        return 2.0 * np.frexp(x.astype(np.float64))[1]


class StarOracle(DistanceOracle):
    """Base objects 0..n-1 far apart (about 2-3); hubs n..2n-1 at about 1 from every base.

    Inserting a hub makes it everyone's nearest neighbor, which is the
    worst case for structures that keep true nearest neighbors.
    """

    def __init__(self, n: int, seed: int = 0, memo: bool = False):
        super().__init__(memo=memo)
        self.n = n
        self.seed = seed

    def __len__(self):
        return 2 * self.n

    def _distances(self, a, bs):
        u = pair_uniform(self.seed, a, bs)
        a_hub = a >= self.n
        b_hub = bs >= self.n
        out = 2.0 + u
        out[a_hub ^ b_hub] = 1.0 + 1e-3 * u[a_hub ^ b_hub]
        out[a_hub & b_hub] = 1.5
        return out


def _xor_fractal(rng, n: int, dim: int, levels: int) -> np.ndarray:
    widths = [dim // levels] * levels
    widths[0] += dim - sum(widths)
    blocks = []
    for w in widths:
        gens = rng.integers(0, 2, size=(5, w), dtype=np.uint8)
        combos = np.zeros((32, w), dtype=np.uint8)
        for mask in range(1, 32):
            for g in range(5):
                if mask >> g & 1:
                    combos[mask] ^= gens[g]
        choice = rng.integers(1, 32, size=n)
        blocks.append(combos[choice])
    return np.concatenate(blocks, axis=1).astype(np.float64) if n else np.zeros((0, dim))


def generate(spec: InstanceSpec):
    """Build ``(objects, oracle)`` for an instance spec.

    ``objects`` is whatever the oracle's handles index: a point array, leaf
    labels, the matrix, or ``arange(n)`` for hashed distances.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    kind = spec.kind
    if kind == "uniform_hypercube":
        objects = rng.random((n, spec.dim))
        oracle = VectorOracle(objects, spec.resolved_metric)
    elif kind == "xor_fractal":
        objects = _xor_fractal(rng, n, spec.dim, spec.levels)
        oracle = VectorOracle(objects, "hamming")
    elif kind == "tree_leaves":
        objects = rng.integers(0, 1 << spec.depth, size=n, dtype=np.uint64)
        oracle = TreeLeafOracle(objects, spec.depth)
    elif kind == "random_matrix":
        upper = np.triu(rng.random((n, n)), k=1)
        objects = upper + upper.T
        oracle = MatrixOracle(objects)
    else:
        objects = np.arange(n)
        oracle = PairHashOracle(n, spec.seed)
    if spec.negate:
        oracle = NegatedOracle(oracle)
    return objects, oracle


def materialize(oracle: DistanceOracle, n: int) -> np.ndarray:
    """Full n x n matrix of an oracle over handles 0..n-1 (uncounted; diagonal 0)."""
    m = np.zeros((n, n))
    for i in range(n):
        if i:
            m[i, :i] = oracle.many(i, np.arange(i), count=False)
    return m + m.T


# -- text formats -------------------------------------------------------------


def dump_lower_triangle(matrix, fh: TextIO) -> None:
    """Count line, then row i holding d(i, 0) .. d(i, i-1)."""
    m = np.asarray(matrix, dtype=np.float64)
    n = m.shape[0]
    fh.write(f"{n}\n")
    for i in range(n):
        fh.write(" ".join(repr(float(v)) for v in m[i, :i]) + "\n")


def load_lower_triangle(fh: TextIO) -> MatrixOracle:
    lines = fh.read().splitlines()
    if not lines:
        raise ValueError("empty matrix file")
    n = int(lines[0].strip())
    rows = lines[1:1 + n]
    if len(rows) < n:
        rows += [""] * (n - len(rows))
    m = np.zeros((n, n))
    for i, line in enumerate(rows):
        vals = [float(t) for t in line.split()]
        if len(vals) != i:
            raise ValueError(f"row {i} has {len(vals)} values, expected {i}")
        m[i, :i] = vals
    return MatrixOracle(m + m.T)


def dump_points_csv(points, fh: TextIO) -> None:
    pts = np.asarray(points, dtype=np.float64)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["id"] + [f"x{k}" for k in range(pts.shape[1])])
    for i, row in enumerate(pts):
        w.writerow([i] + [repr(float(v)) for v in row])
