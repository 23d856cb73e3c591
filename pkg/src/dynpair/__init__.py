"""Dynamic closest pair structures for arbitrary ordered distances."""

from .baselines import BruteForce, NeighborHeuristic
from .conga import CongaLine, create_path
from .core import (
    INF,
    CapacityError,
    ClosestPairError,
    ClosestPairStructure,
    DistanceOracle,
    FunctionOracle,
    HandleError,
    MatrixOracle,
    NegatedOracle,
    PairReport,
    UnorderedDistanceError,
    VectorOracle,
    brute_force_min,
    is_infinite,
)
from .quadtree import QuadTree
from .variants import FastPair, MultiConga

BACKENDS = {
    "bf": BruteForce,
    "nh": NeighborHeuristic,
    "cl": CongaLine,
    "mc": MultiConga,
    "fp": FastPair,
    "qt": QuadTree,
}


def make_backend(name, oracle, **kwargs) -> ClosestPairStructure:
    """Instantiate a backend by short name (bf, nh, cl, mc, fp, qt) or class."""
    if isinstance(name, str):
        try:
            cls = BACKENDS[name]
        except KeyError:
            raise ValueError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}") from None
    else:
        cls = name
    return cls(oracle, **kwargs)


__all__ = [
    "BACKENDS", "INF", "BruteForce", "CapacityError", "ClosestPairError",
    "ClosestPairStructure", "CongaLine", "DistanceOracle", "FastPair",
    "FunctionOracle", "HandleError", "MatrixOracle", "MultiConga",
    "NegatedOracle", "NeighborHeuristic", "PairReport", "QuadTree",
    "UnorderedDistanceError", "VectorOracle", "brute_force_min", "create_path",
    "is_infinite", "make_backend",
]
