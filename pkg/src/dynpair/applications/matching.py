"""Greedy matching: repeatedly take and remove the closest remaining pair."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, TextIO

from ..core import DistanceOracle
from ._common import Overlay, handles_of, open_backend


@dataclass
class Matching:
    pairs: list = field(default_factory=list)  # (a, b, d) in selection order
    leftover: Optional[int] = None
    stats: dict = field(default_factory=dict)

    @property
    def weight(self) -> float:
        return float(sum(d for _, _, d in self.pairs))

    def pair_set(self) -> set:
        return {frozenset((a, b)) for a, b, _ in self.pairs}

    def weights(self) -> list:
        return sorted(d for _, _, d in self.pairs)

    def validate(self, handles) -> None:
        used = [h for a, b, _ in self.pairs for h in (a, b)]
        if len(used) != len(set(used)):
            raise ValueError("matching pairs overlap")
        rest = set(handles) - set(used)
        if len(rest) > 1 or (rest and rest != {self.leftover}):
            raise ValueError("matching leaves more than one point unmatched")

    def write_csv(self, fh: TextIO) -> None:
        fh.write("a,b,distance\n")
        for a, b, d in self.pairs:
            fh.write(f"{a},{b},{d!r}\n")
        fh.write(f"# weight,{self.weight!r}\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def greedy_matching(points, oracle: DistanceOracle, backend="fp", **backend_kwargs) -> Matching:
    """Greedy minimum matching; pass a negated oracle for the maximum version."""
    pts = handles_of(points)
    view = Overlay(oracle)
    struct = open_backend(backend, view, backend_kwargs)
    struct.build(pts)
    m = Matching()
    while len(struct) >= 2:
        a, b, d = struct.closest_pair()
        m.pairs.append((a, b, d))
        struct.delete(a)
        struct.delete(b)
    if len(struct):
        m.leftover = struct.handles()[0]
    m.stats = {"oracle_evals": view.evals, "peak_objects": struct.peak_size}
    return m


def reference_greedy_matching(points, oracle: DistanceOracle) -> Matching:
    """Sort all pairs once and take each pair whose ends are both still free."""
    pts = handles_of(points)
    cand = []
    for i in range(len(pts) - 1):
        ds = oracle.many(pts[i], pts[i + 1:], count=False)
        cand.extend((d, pts[i], pts[i + 1 + k]) for k, d in enumerate(ds.tolist()))
    cand.sort(key=lambda t: t[0])
    free = set(pts)
    m = Matching()
    for d, a, b in cand:
        if a in free and b in free:
            m.pairs.append((a, b, d))
            free -= {a, b}
    if free:
        m.leftover = free.pop()
    return m
