"""Fully dynamic consistent k-center clustering with worst-case recourse.

Maintains a 24-approximate set of k centers under point insertions and
deletions, changing at most one center per insertion and two per deletion.
"""
from .clusterer import CenterDiff, Clusterer, StepReport, UpdateEvent, new_clusterer
from .core_ops import SmoothRankDelta, TripleState
from .forest import LeveledForest
from .metric import MetricUniverse, rank_cap, validate_universe
from .oracle import OracleResult, brute_force_opt, gonzalez

__all__ = [
    "CenterDiff",
    "Clusterer",
    "LeveledForest",
    "MetricUniverse",
    "OracleResult",
    "SmoothRankDelta",
    "StepReport",
    "TripleState",
    "UpdateEvent",
    "brute_force_opt",
    "gonzalez",
    "new_clusterer",
    "rank_cap",
    "validate_universe",
]
