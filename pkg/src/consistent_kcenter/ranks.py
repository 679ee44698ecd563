"""Rank functions and brute-force checkers for their properties.

A rank function is a plain ``dict`` mapping point id to a nonnegative int.
The checkers are audit tools: quadratic, exhaustive, and they return every
violation rather than a boolean.
"""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .metric import MetricUniverse, PointId
from .validation import ValidationReport

RankFunction = Mapping[PointId, int]


def ordered_ranks(xi: RankFunction) -> list[int]:
    """All ranks in nonincreasing order; entry ``i - 1`` is the i-th largest."""
    return sorted(xi.values(), reverse=True)


def ordered_rank(xi: RankFunction, i: int) -> int:
    """The i-th largest rank (1-based)."""
    if not 1 <= i <= len(xi):
        raise ValueError(f"i must lie in [1, {len(xi)}], got {i}")
    return ordered_ranks(xi)[i - 1]


def _ids_and_ranks(points: Iterable[PointId], xi: RankFunction) -> tuple[list[PointId], np.ndarray]:
    ids = sorted(points)
    return ids, np.array([xi[p] for p in ids], dtype=np.int64)


def check_separation(
    points: Iterable[PointId], xi: RankFunction, u: MetricUniverse
) -> list[tuple[PointId, PointId]]:
    """Pairs ``{p1, p2}`` with ``d(p1, p2) < 2**min(rank(p1), rank(p2))``."""
    ids, r = _ids_and_ranks(points, xi)
    if len(ids) < 2:
        return []
    d = u.pairwise(ids)
    thr = np.exp2(np.minimum(r[:, None], r[None, :]).astype(np.float64))
    bad = np.argwhere(np.triu(d < thr, 1))
    return [(ids[i], ids[j]) for i, j in bad]


def check_maximality(points: Iterable[PointId], xi: RankFunction, u: MetricUniverse) -> list[PointId]:
    """Points that are neither the unique top-rank point nor have a higher-ranked
    point strictly within ``2**(rank + 1)``."""
    ids, r = _ids_and_ranks(points, xi)
    n = len(ids)
    if n == 0:
        return []
    d = u.pairwise(ids)
    higher = r[None, :] > r[:, None]
    close = d < np.exp2((r + 1).astype(np.float64))[:, None]
    witnessed = np.any(higher & close, axis=1)
    top = r.max()
    unique_top = np.count_nonzero(r == top) == 1
    out = []
    for i in range(n):
        if witnessed[i]:
            continue
        if unique_top and r[i] == top:
            continue
        out.append(ids[i])
    return out


def check_valid_tuple(
    points: Iterable[PointId],
    xi_g: RankFunction,
    xi_s: RankFunction,
    u: MetricUniverse,
) -> ValidationReport:
    """Check the three valid-tuple properties of ``(xi_g, xi_s)``.

    Property 3 is checked for ``r`` in ``[0, rank_cap]``; larger ``r`` are
    vacuous because no rank exceeds the cap.
    """
    report = ValidationReport()
    ids = sorted(points)
    for p in check_separation(ids, xi_g, u):
        report.add("separation", f"{p[0]} and {p[1]} too close for their geometric ranks", *p)
    for p in check_maximality(ids, xi_g, u):
        report.add("maximality", f"{p} has no higher-ranked witness", p)
    og, os_ = ordered_ranks(xi_g), ordered_ranks(xi_s)
    for i, (a, b) in enumerate(zip(og, os_), start=1):
        if a < b:
            report.add("dominance", f"xi_G*({i}) = {a} < xi_S*({i}) = {b}", i)
    if ids:
        gr = np.array([xi_g[p] for p in ids])
        sr = np.array([xi_s[p] for p in ids])
        d = u.pairwise(ids)
        cap = max(u.rank_cap, int(gr.max()))
        for r in range(cap + 1):
            holders = sr >= r
            near = d <= 4.0 * 2.0**r
            has = np.any(near & holders[None, :], axis=1)
            for i in np.flatnonzero((gr >= r) & ~has):
                report.add("proximity", f"no smooth witness of rank >= {r} within {4 * 2**r} of {ids[i]}", r, ids[i])
    return report


def opt_lower_bound(xi: RankFunction, k: int) -> float:
    """``0.5 * 2**xi*(k+1)``, a lower bound on the optimal k-center cost under separation."""
    if not 1 <= k <= len(xi) - 1:
        raise ValueError(f"k must lie in [1, {len(xi) - 1}] for this point set, got {k}")
    return 0.5 * 2.0 ** ordered_rank(xi, k + 1)
