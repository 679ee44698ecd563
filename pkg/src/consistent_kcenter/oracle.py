"""Ground-truth k-center values: exhaustive search and farthest-first traversal.

Both are deliberately naive and share nothing with the clustering code apart
from the distance oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import OracleCapacityError
from .metric import MetricUniverse, PointId

DEFAULT_ENUMERATION_CAP = 2_000_000
_CHUNK = 50_000


@dataclass(frozen=True)
class OracleResult:
    value: float
    witness_centers: tuple[PointId, ...]
    method: str


def cost(points: Iterable[PointId], centers: Iterable[PointId], u: MetricUniverse) -> float:
    """``max_p min_c d(p, c)``; zero for an empty point set."""
    points, centers = sorted(points), sorted(centers)
    if not points:
        return 0.0
    if not centers:
        raise ValueError("cost of a nonempty point set needs at least one center")
    best = []
    for p in points:
        best.append(min(u.distance(p, c) for c in centers))
    return max(best)


def brute_force_opt(
    points: Iterable[PointId],
    k: int,
    u: MetricUniverse,
    candidates: Sequence[PointId] | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> OracleResult:
    """Exact OPT_k over center sets drawn from ``candidates`` (default: the whole universe).

    Subsets of size ``min(k, |candidates|)`` are enumerated in lexicographic
    order; adding a center never raises the cost, so this covers all sets of
    size at most k, and the witness is the lexicographically least minimiser.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    points = sorted(points)
    if not points:
        return OracleResult(0.0, (), "exact")
    if k >= len(points):
        return OracleResult(0.0, tuple(points), "exact")
    cands = sorted(candidates) if candidates is not None else list(u.points)
    size = min(k, len(cands))
    total = math.comb(len(cands), size)
    if total > cap:
        raise OracleCapacityError(f"C({len(cands)}, {size}) = {total} subsets exceeds cap {cap}")
    d = u.cross(points, cands)
    best_val = math.inf
    best_idx: tuple[int, ...] = ()
    combos = itertools.combinations(range(len(cands)), size)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.intp)
        vals = d[:, idx].min(axis=2).max(axis=0)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_idx = chunk[i]
    return OracleResult(best_val, tuple(cands[i] for i in best_idx), "exact")


def gonzalez(
    points: Iterable[PointId], k: int, u: MetricUniverse, seed_point: PointId | None = None
) -> OracleResult:
    """Farthest-first traversal from ``seed_point`` (default: the smallest id).

    Ties for the farthest point go to the smallest id.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    points = sorted(points)
    if not points:
        raise ValueError("gonzalez needs a nonempty point set")
    seed = points[0] if seed_point is None else seed_point
    if seed not in points:
        raise ValueError(f"seed point {seed!r} is not in the point set")
    centers = [seed]
    nearest = u.distances(seed, points)
    while len(centers) < min(k, len(points)):
        nxt = points[int(np.argmax(nearest))]
        centers.append(nxt)
        nearest = np.minimum(nearest, u.distances(nxt, points))
    return OracleResult(float(nearest.max()), tuple(centers), "gonzalez")
