"""Clustering, TSP and matching drivers parameterized by a closest pair backend."""

from .clustering import (
    RECURRENCE_KINDS,
    ClusterDistances,
    Dendrogram,
    LinkageRule,
    agglomerate,
    centroid_combine,
)
from .matching import Matching, greedy_matching, reference_greedy_matching
from .tsp import (
    Tour,
    cheapest_insertion_tsp,
    multifragment_tsp,
    reference_cheapest_insertion,
    reference_multifragment,
    tour_length,
)

__all__ = [
    "RECURRENCE_KINDS", "ClusterDistances", "Dendrogram", "LinkageRule",
    "Matching", "Tour", "agglomerate", "centroid_combine",
    "cheapest_insertion_tsp", "greedy_matching", "multifragment_tsp",
    "reference_cheapest_insertion", "reference_greedy_matching",
    "reference_multifragment", "tour_length",
]
