"""Insert / RankDecrease / DeleteWithoutMaximality / GroupIncrease / Delete.

Each operation mutates a :class:`TripleState` in place and returns the
:class:`SmoothRankDelta` it caused.  Every "arbitrary" choice is resolved
deterministically: the other child in RankDecrease is the first child in
:meth:`LeveledForest.ordered_children`, the representative of a group is its
minimum point id, and groups are built greedily in ascending point id.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, PreconditionError, StateError
from .forest import LeveledForest
from .metric import MetricUniverse, PointId


@dataclass
class TripleState:
    forest: LeveledForest = field(default_factory=LeveledForest)
    xi_g: dict[PointId, int] = field(default_factory=dict)
    xi_s: dict[PointId, int] = field(default_factory=dict)

    def points(self) -> list[PointId]:
        return sorted(self.xi_g)

    def copy(self) -> TripleState:
        return TripleState(self.forest.copy(), dict(self.xi_g), dict(self.xi_s))

    def __len__(self) -> int:
        return len(self.xi_g)


@dataclass
class SmoothRankDelta:
    raised: list[tuple[PointId, int, int]] = field(default_factory=list)
    lowered: list[tuple[PointId, int, int]] = field(default_factory=list)
    removed: PointId | None = None

    @classmethod
    def between(
        cls, before: dict[PointId, int], after: dict[PointId, int], removed: PointId | None = None
    ) -> SmoothRankDelta:
        delta = cls(removed=removed)
        for p in sorted(before):
            if p not in after:
                continue
            old, new = before[p], after[p]
            if new > old:
                delta.raised.append((p, old, new))
            elif new < old:
                delta.lowered.append((p, old, new))
        return delta

    def crossings(self, h: int, old_removed_rank: int | None = None) -> tuple[int, int]:
        """(downward, upward) crossings of level ``h``; the removed point counts as
        downward when its old rank was at least ``h``."""
        down = sum(1 for _, old, new in self.lowered if old >= h > new)
        if self.removed is not None and old_removed_rank is not None and old_removed_rank >= h:
            down += 1
        up = sum(1 for _, old, new in self.raised if old < h <= new)
        return down, up

    def to_dict(self) -> dict:
        return {
            "raised": [list(t) for t in self.raised],
            "lowered": [list(t) for t in self.lowered],
            "removed": self.removed,
        }


def _unique_holder(f: LeveledForest, v: int, ranks: dict[PointId, int], threshold: int) -> PointId:
    found = [p for p in f.leaves_under(v) if ranks[p] >= threshold]
    if len(found) != 1:
        raise StateError(f"node {v} has {len(found)} leaves with rank >= {threshold}, expected 1")
    return found[0]


def insert(s: TripleState, q: PointId, u: MetricUniverse) -> SmoothRankDelta:
    """Add ``q`` with geometric and smooth rank equal to the largest admissible level."""
    if q in s.xi_g:
        raise StateError(f"point {q!r} is already active")
    ids = s.points()
    d = u.distances(q, ids)
    if ids:
        if np.any(d < 1.0):
            p = ids[int(np.argmax(d < 1.0))]
            raise InputError(f"d({q},{p}) < 1")
        if np.any(d > u.delta):
            p = ids[int(np.argmax(d > u.delta))]
            raise InputError(f"d({q},{p}) > delta={u.delta}")
    ranks = np.array([s.xi_g[p] for p in ids], dtype=np.int64)
    level = 0
    for i in range(u.rank_cap, -1, -1):
        if np.all(d >= np.exp2(np.minimum(i, ranks).astype(np.float64))):
            level = i
            break
    s.forest.add_leaf_with_path(q, level)
    s.xi_g[q] = level
    s.xi_s[q] = level
    return SmoothRankDelta()


def rank_decrease(s: TripleState, q: PointId, u: MetricUniverse | None = None) -> SmoothRankDelta:
    """Lower the geometric rank of ``q`` by one, cutting ``q``'s top edge."""
    f = s.forest
    g = s.xi_g.get(q)
    if g is None:
        raise StateError(f"point {q!r} is not active")
    if g < 1:
        raise PreconditionError(f"rank_decrease needs geometric rank >= 1, {q!r} has {g}")
    before = dict(s.xi_s)
    lower = f.ancestor_at_height(q, g - 1)
    upper = f.ancestor_at_height(q, g)
    if f.parent(lower) != upper:
        raise StateError(f"ancestors of {q!r} at heights {g - 1},{g} are not adjacent")
    holder = _unique_holder(f, upper, s.xi_s, f.height(upper))
    s.xi_g[q] = g - 1
    siblings = [c for c in f.ordered_children(upper) if c != lower]
    if not siblings:
        f.detach_edge(lower, upper, delete_v_if_childless=True)
        s.xi_s[holder] = f.height(lower)
    else:
        other = siblings[0]
        holder_below = f.is_ancestor(lower, f.leaf(holder))
        if holder_below:
            other_holder = _unique_holder(f, other, s.xi_s, f.height(other))
            old = s.xi_s[holder]
            s.xi_s[holder] = f.height(lower)
            s.xi_s[other_holder] = old
        f.detach_edge(lower, upper)
    return SmoothRankDelta.between(before, s.xi_s)


def delete_without_maximality(s: TripleState, q: PointId, u: MetricUniverse | None = None) -> SmoothRankDelta:
    """Decrement ``q`` down to rank 0, then drop its now isolated leaf."""
    if q not in s.xi_g:
        raise StateError(f"point {q!r} is not active")
    before = dict(s.xi_s)
    for _ in range(s.xi_g[q]):
        rank_decrease(s, q, u)
    s.forest.remove_leaf(q)
    del s.xi_g[q]
    del s.xi_s[q]
    return SmoothRankDelta.between(before, s.xi_s, removed=q)


def _check_group(s: TripleState, group: list[PointId], h: int, u: MetricUniverse) -> None:
    members = set(group)
    for q in group:
        if s.xi_g[q] != h:
            raise InputError(f"group member {q!r} has geometric rank {s.xi_g[q]}, expected {h}")
    lo, hi = 2.0 ** (h + 1), 2.0 ** (h + 2)
    if len(group) > 1:
        d = u.pairwise(group)
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if not lo <= d[i, j] < hi:
                    raise InputError(
                        f"group pair ({group[i]},{group[j]}) at distance {d[i, j]} outside [{lo}, {hi})"
                    )
    outsiders = [p for p in s.points() if p not in members]
    if outsiders:
        thr = np.exp2(np.minimum(h + 1, np.array([s.xi_g[p] for p in outsiders])).astype(np.float64))
        d = u.cross(group, outsiders)
        bad = np.argwhere(d < thr[None, :])
        if len(bad):
            i, j = bad[0]
            raise InputError(
                f"group member {group[i]!r} at distance {d[i, j]} < {thr[j]} from outsider {outsiders[j]!r}"
            )


def group_increase(s: TripleState, group, h: int, u: MetricUniverse) -> SmoothRankDelta:
    """Promote every point of ``group`` (all of rank ``h``) to rank ``h + 1`` under one new node."""
    group = sorted(set(group))
    if not group:
        return SmoothRankDelta()
    for q in group:
        if q not in s.xi_g:
            raise StateError(f"point {q!r} is not active")
    _check_group(s, group, h, u)
    f = s.forest
    roots = {}
    for q in group:
        r = f.root_of(f.leaf(q))
        if f.height(r) != h:
            raise StateError(f"root of {q!r} has height {f.height(r)}, expected {h}")
        roots[q] = r
    before = dict(s.xi_s)
    rep_root = roots[group[0]]
    found = [p for p in f.leaves_under(rep_root) if s.xi_s[p] == h]
    if len(found) != 1:
        raise StateError(f"root {rep_root} has {len(found)} smooth holders at level {h}")
    f.attach_new_parent(roots.values())
    for q in group:
        s.xi_g[q] = h + 1
    s.xi_s[found[0]] = h + 1
    return SmoothRankDelta.between(before, s.xi_s)


def maximal_group(s: TripleState, level: int, u: MetricUniverse, dist: np.ndarray | None = None) -> list[PointId]:
    """Greedy maximal set of rank-``level`` points eligible for promotion.

    A candidate ``c`` is admissible iff it is at distance at least
    ``2**min(level + 1, rank(p))`` from every point ``p`` outside the group,
    and at least ``2**(level + 1)`` from every group member.  The outsider
    requirement against other rank-``level`` candidates is ``2**level``
    whether or not they join, so admissibility splits into a fixed filter plus
    a pairwise check against the growing group, and one ascending pass is
    maximal.
    """
    ids = s.points()
    if dist is None:
        dist = u.pairwise(ids)
    ranks = np.array([s.xi_g[p] for p in ids], dtype=np.int64)
    cand = np.flatnonzero(ranks == level)
    if len(cand) == 0:
        return []
    thr = np.exp2(np.minimum(level + 1, ranks).astype(np.float64))
    sub = dist[cand]
    ok = sub >= thr[None, :]
    ok[np.arange(len(cand)), cand] = True
    viable = cand[np.all(ok, axis=1)]
    far = 2.0 ** (level + 1)
    chosen: list[int] = []
    for c in viable:
        if all(dist[c, m] >= far for m in chosen):
            chosen.append(int(c))
    return [ids[c] for c in chosen]


def delete(s: TripleState, q: PointId, u: MetricUniverse) -> SmoothRankDelta:
    """Remove ``q`` and restore maximality by promoting maximal groups level by level."""
    if q not in s.xi_g:
        raise StateError(f"point {q!r} is not active")
    before = dict(s.xi_s)
    delete_without_maximality(s, q, u)
    if s.xi_g:
        ids = s.points()
        dist = u.pairwise(ids)
        for level in range(u.rank_cap):
            group = maximal_group(s, level, u, dist)
            group_increase(s, group, level, u)
    return SmoothRankDelta.between(before, s.xi_s, removed=q)
