"""Shared vocabulary for the closest-pair structures.

Objects are identified by non-negative integer handles.  Distances come
from a :class:`DistanceOracle`, which only needs to return values from a
totally ordered set; numeric oracles return floats and use ``math.inf`` as
the top element, non-numeric ones return arbitrary comparable objects and
use the :data:`INF` sentinel.

Every backend implements :class:`ClosestPairStructure`.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np


class ClosestPairError(Exception):
    """Base class for errors raised by the structures."""


class HandleError(ClosestPairError, KeyError):
    """Duplicate insert, or an operation on a dead or unknown handle."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class UnorderedDistanceError(ClosestPairError, ValueError):
    """The oracle returned a value that cannot be ordered (e.g. NaN)."""


class CapacityError(ClosestPairError):
    """A structure with a hard size limit was asked to grow past it."""


class _Infinity:
    """Top element of any distance order.  Compares greater than everything else."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __hash__(self):
        return hash("dynpair.INF")

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_infinite(d: Any) -> bool:
    if d is INF:
        return True
    try:
        return d == math.inf
    except Exception:
        return False


class PairReport(NamedTuple):
    a: int
    b: int
    d: Any


def _scalar(v: Any) -> Any:
    return v.item() if isinstance(v, np.generic) else v


def first_min(values: np.ndarray) -> int:
    """Index of the first minimum (ties resolve to the earliest position)."""
    return int(np.argmin(values))


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


class DistanceOracle:
    """Symmetric distance source with an evaluation counter.

    Subclasses implement ``_distances(a, bs)`` returning a fresh 1-d array of
    ``d(a, b)`` for each ``b`` in the integer array ``bs``.  ``evals`` goes up
    by one per underlying evaluation; memo hits are free.

    ``set_infinite(a, b)`` flips one pair to the top element.  This is how a
    caller reconfigures the oracle before telling a structure to
    ``invalidate_pair``.
    """

    numeric: bool = True
    infinity: Any = math.inf

    def __init__(self, memo: bool = False):
        self.evals = 0
        self.memo: Optional[dict] = {} if memo else None
        self._infinite: dict[int, set[int]] = {}

    @property
    def memo_mode(self) -> str:
        return "none" if self.memo is None else "full-matrix"

    @property
    def dtype(self):
        return np.float64 if self.numeric else object

    def _distances(self, a: int, bs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _raw(self, a: int, bs: np.ndarray) -> np.ndarray:
        out = self._distances(a, bs)
        if self.numeric:
            out = np.asarray(out, dtype=np.float64)
            if np.isnan(out).any():
                bad = int(bs[np.flatnonzero(np.isnan(out))[0]])
                raise UnorderedDistanceError(
                    f"oracle returned NaN for pair ({a}, {bad})")
        else:
            if not isinstance(out, np.ndarray) or out.dtype != object:
                arr = np.empty(len(bs), dtype=object)
                arr[:] = list(out)
                out = arr
            for i, v in enumerate(out):
                if v != v:
                    raise UnorderedDistanceError(
                        f"oracle returned unordered value {v!r} for pair ({a}, {int(bs[i])})")
        return out

    def many(self, a: int, bs: Sequence[int], count: bool = True) -> np.ndarray:
        """Distances from ``a`` to every handle in ``bs``.

        With ``count=False`` the call is invisible to the counter and the memo
        (used by verifiers).
        """
        bs = np.asarray(bs, dtype=np.intp)
        a = int(a)
        if self.memo is not None and count:
            out = np.empty(len(bs), dtype=self.dtype)
            missing = []
            for i, b in enumerate(bs.tolist()):
                key = (a, b) if a < b else (b, a)
                if key in self.memo:
                    out[i] = self.memo[key]
                else:
                    missing.append(i)
            if missing:
                idx = np.asarray(missing, dtype=np.intp)
                vals = self._raw(a, bs[idx])
                self.evals += len(idx)
                out[idx] = vals
                for i, v in zip(missing, vals.tolist() if self.numeric else vals):
                    b = int(bs[i])
                    self.memo[(a, b) if a < b else (b, a)] = v
        else:
            out = self._raw(a, bs)
            if count:
                self.evals += len(bs)
        partners = self._infinite.get(a)
        if partners:
            hit = np.isin(bs, np.fromiter(partners, dtype=np.intp, count=len(partners)))
            if hit.any():
                out[hit] = self.infinity
        return out

    def __call__(self, a: int, b: int) -> Any:
        return _scalar(self.many(a, [b])[0])

    def peek(self, a: int, b: int) -> Any:
        return _scalar(self.many(a, [b], count=False)[0])

    def set_infinite(self, a: int, b: int) -> None:
        a, b = int(a), int(b)
        self._infinite.setdefault(a, set()).add(b)
        self._infinite.setdefault(b, set()).add(a)

    def is_set_infinite(self, a: int, b: int) -> bool:
        return b in self._infinite.get(a, ())


class FunctionOracle(DistanceOracle):
    """Wraps a plain ``fn(a, b)`` on handles.

    For non-numeric distances pass ``numeric=False``; the top element then
    defaults to :data:`INF`.
    """

    def __init__(self, fn: Callable[[int, int], Any], numeric: bool = True,
                 infinity: Any = None, memo: bool = False):
        super().__init__(memo=memo)
        self.fn = fn
        self.numeric = numeric
        if infinity is not None:
            self.infinity = infinity
        elif not numeric:
            self.infinity = INF

    def _distances(self, a, bs):
        if self.numeric:
            return np.fromiter((self.fn(a, b) for b in bs.tolist()),
                               dtype=np.float64, count=len(bs))
        out = np.empty(len(bs), dtype=object)
        out[:] = [self.fn(a, b) for b in bs.tolist()]
        return out


class MatrixOracle(DistanceOracle):
    """Explicit symmetric distance matrix; handles are row indices."""

    def __init__(self, matrix, memo: bool = False):
        super().__init__(memo=memo)
        m = np.array(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        self.matrix = m

    def __len__(self):
        return self.matrix.shape[0]

    def _distances(self, a, bs):
        return self.matrix[a, bs]


def _metric_rows(metric: str, rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    if metric == "dot_product":
        return -(rows * x).sum(axis=1)
    diff = rows - x
    if metric == "l2":
        return np.sqrt((diff * diff).sum(axis=1))
    if metric == "l1":
        return np.abs(diff).sum(axis=1)
    if metric == "linf":
        return np.abs(diff).max(axis=1, initial=0.0)
    if metric == "hamming":
        return (diff != 0).sum(axis=1).astype(np.float64)
    raise ValueError(f"unknown metric {metric!r}")


METRICS = ("l1", "l2", "linf", "dot_product", "hamming")


class VectorOracle(DistanceOracle):
    """Points in R^d under an L1/L2/Linf/Hamming metric or negated dot product.

    New points can be appended with :meth:`add`, which returns their handle.
    """

    def __init__(self, points, metric: str = "l2", memo: bool = False):
        super().__init__(memo=memo)
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        self.metric = metric
        self._n = pts.shape[0]
        self._pts = pts

    def __len__(self):
        return self._n

    @property
    def points(self) -> np.ndarray:
        return self._pts[: self._n]

    def add(self, point) -> int:
        point = np.asarray(point, dtype=np.float64).reshape(-1)
        if self._n == self._pts.shape[0]:
            grown = np.empty((max(4, 2 * self._n), self._pts.shape[1]))
            grown[: self._n] = self._pts[: self._n]
            self._pts = grown
        self._pts[self._n] = point
        self._n += 1
        return self._n - 1

    def _distances(self, a, bs):
        return _metric_rows(self.metric, self._pts[bs], self._pts[a])


class NegatedOracle(DistanceOracle):
    """Every distance negated: turns a minimization problem into maximization."""

    def __init__(self, base: DistanceOracle, memo: bool = False):
        if not base.numeric:
            raise ValueError("only numeric oracles can be negated")
        super().__init__(memo=memo)
        self.base = base

    def __len__(self):
        return len(self.base)

    def _distances(self, a, bs):
        return -self.base._raw(a, bs)


# --------------------------------------------------------------------------
# Structure contract
# --------------------------------------------------------------------------


class LiveSet:
    """Sorted array of live handles plus a set for O(1) membership."""

    def __init__(self):
        self.array = np.empty(0, dtype=np.intp)
        self._set: set[int] = set()

    def __len__(self):
        return len(self._set)

    def __contains__(self, h):
        return h in self._set

    def __iter__(self):
        return iter(self.array.tolist())

    def add(self, h: int) -> None:
        i = int(np.searchsorted(self.array, h))
        self.array = np.insert(self.array, i, h)
        self._set.add(h)

    def remove(self, h: int) -> None:
        i = int(np.searchsorted(self.array, h))
        self.array = np.delete(self.array, i)
        self._set.remove(h)

    def index(self, h: int) -> int:
        return int(np.searchsorted(self.array, h))

    def without(self, h: int) -> np.ndarray:
        i = self.index(h)
        return np.concatenate((self.array[:i], self.array[i + 1:]))


def _as_handle(x) -> int:
    if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
        raise HandleError(f"handle must be an integer, got {x!r}")
    x = int(x)
    if x < 0:
        raise HandleError(f"handle must be non-negative, got {x}")
    return x


class ClosestPairStructure:
    """Dynamic set of handles that can report a closest pair at any time.

    Subclasses implement ``_insert``, ``_delete``, ``_closest_pair`` and
    ``_invalidate``; validation and bookkeeping live here.
    """

    name = "?"

    def __init__(self, oracle: DistanceOracle):
        self.oracle = oracle
        self.live = LiveSet()
        self.peak_size = 0

    def __len__(self) -> int:
        return len(self.live)

    def __contains__(self, x) -> bool:
        return x in self.live

    def handles(self) -> list[int]:
        return self.live.array.tolist()

    def _require_live(self, x) -> int:
        x = _as_handle(x)
        if x not in self.live:
            raise HandleError(f"handle {x} is not live")
        return x

    def build(self, handles: Iterable[int]) -> None:
        """Insert many handles at once; backends may construct in bulk."""
        for h in handles:
            self.insert(h)

    def _admit(self, x) -> int:
        x = _as_handle(x)
        if x in self.live:
            raise HandleError(f"handle {x} is already live")
        self.live.add(x)
        self.peak_size = max(self.peak_size, len(self.live))
        return x

    def insert(self, x) -> None:
        x = self._admit(x)
        try:
            self._insert(x)
        except UnorderedDistanceError:
            self.live.remove(x)
            raise

    def delete(self, x) -> None:
        x = self._require_live(x)
        self.live.remove(x)
        self._delete(x)

    def closest_pair(self) -> Optional[PairReport]:
        if len(self.live) < 2:
            return None
        return self._closest_pair()

    def invalidate_pair(self, a, b) -> None:
        """Repair after the caller flipped ``d(a, b)`` to infinity on the oracle."""
        a, b = self._require_live(a), self._require_live(b)
        if a == b:
            raise ValueError("invalidate_pair needs two distinct handles")
        self._invalidate(a, b)

    def _insert(self, x: int) -> None:
        raise NotImplementedError

    def _delete(self, x: int) -> None:
        raise NotImplementedError

    def _closest_pair(self) -> PairReport:
        raise NotImplementedError

    def _invalidate(self, a: int, b: int) -> None:
        raise NotImplementedError


def brute_force_min(oracle: DistanceOracle, handles: Sequence[int],
                    count: bool = False) -> Optional[PairReport]:
    """Exact closest pair by scanning every pair in ascending-handle order."""
    hs = np.sort(np.asarray(handles, dtype=np.intp))
    best = None
    for i in range(len(hs) - 1):
        ds = oracle.many(int(hs[i]), hs[i + 1:], count=count)
        j = first_min(ds)
        if best is None or ds[j] < best.d:
            best = PairReport(int(hs[i]), int(hs[i + 1 + j]), _scalar(ds[j]))
    return best
