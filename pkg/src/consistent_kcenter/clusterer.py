"""Consistent k-center maintenance on top of the valid-triple operations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import core_ops
from .core_ops import SmoothRankDelta, TripleState
from .errors import InputError, StateError
from .metric import EUCLIDEAN, MetricUniverse, PointId, validate_universe

INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class UpdateEvent:
    kind: str
    point: PointId
    coords: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in (INSERT, DELETE):
            raise ValueError(f"unknown event kind {self.kind!r}")

    @classmethod
    def insert(cls, point: PointId, coords: Sequence[float] | None = None) -> UpdateEvent:
        return cls(INSERT, point, None if coords is None else tuple(float(c) for c in coords))

    @classmethod
    def delete(cls, point: PointId) -> UpdateEvent:
        return cls(DELETE, point)

    def to_dict(self) -> dict:
        out = {"type": self.kind, "id": self.point}
        if self.coords is not None:
            out["coords"] = list(self.coords)
        return out


@dataclass(frozen=True)
class CenterDiff:
    added: frozenset[PointId]
    removed: frozenset[PointId]

    @property
    def swaps(self) -> int:
        return max(len(self.added), len(self.removed))

    @property
    def sym_diff(self) -> int:
        return len(self.added) + len(self.removed)


@dataclass
class StepReport:
    step: int
    event: UpdateEvent
    centers: list[PointId]
    added: list[PointId]
    removed: list[PointId]
    swaps: int
    sym_diff: int
    size: int
    cost: float
    oracle: dict | None = None
    audit: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "step": self.step,
            "event": {"type": self.event.kind, "id": self.event.point},
            "centers": self.centers,
            "added": self.added,
            "removed": self.removed,
            "swaps": self.swaps,
            "sym_diff": self.sym_diff,
            "size": self.size,
            "cost": self.cost,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        if self.audit is not None:
            out["audit"] = self.audit
        return out


@dataclass
class RecourseSummary:
    steps: int = 0
    inserts: int = 0
    deletes: int = 0
    max_insert_swaps: int = 0
    max_delete_swaps: int = 0
    mean_insert_swaps: float = 0.0
    mean_delete_swaps: float = 0.0
    max_sym_diff: int = 0


def select_centers(
    xi_s: dict[PointId, int], k: int, previous: frozenset[PointId] | set[PointId]
) -> frozenset[PointId]:
    """The k points of largest smooth rank; ties favour previous centers, then smaller ids."""
    if len(xi_s) <= k:
        return frozenset(xi_s)
    order = sorted(xi_s, key=lambda p: (-xi_s[p], p not in previous, p))
    return frozenset(order[:k])


def cost(points: Sequence[PointId], centers: Sequence[PointId], u: MetricUniverse) -> float:
    if not points:
        return 0.0
    if not centers:
        raise ValueError("cost of a nonempty point set needs at least one center")
    d = u.cross(sorted(points), sorted(centers))
    return float(d.min(axis=1).max())


class Clusterer:
    """Owns the valid triple and the current center set for a fixed ``k``."""

    def __init__(self, universe: MetricUniverse, k: int):
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        report = validate_universe(universe)
        if not report.ok:
            raise InputError(f"invalid universe: {report.summary()}")
        self.universe = universe
        self.k = k
        self.delta = universe.delta
        self.triple = TripleState()
        self.centers: frozenset[PointId] = frozenset()
        self.step = 0
        self.recourse_log: list[tuple[str, int, int]] = []
        self.last_delta: SmoothRankDelta | None = None

    @property
    def points(self) -> list[PointId]:
        return self.triple.points()

    def _check_insert(self, event: UpdateEvent) -> None:
        q = event.point
        if q in self.triple.xi_g:
            raise StateError(f"insert of already active point {q!r}")
        u = self.universe
        if u.kind == EUCLIDEAN:
            if event.coords is not None:
                u.register(q, event.coords)
            elif q not in u:
                raise InputError(f"insert of {q!r} carries no coordinates")
        elif q not in u:
            raise InputError(f"point {q!r} is not in the declared universe")
        ids = self.points
        if ids:
            d = u.distances(q, ids)
            for p, dist in zip(ids, d):
                if not 1.0 <= dist <= u.delta:
                    raise InputError(f"d({q},{p}) = {dist} outside [1, {u.delta}]")

    def apply_update(self, event: UpdateEvent) -> tuple[CenterDiff, StepReport]:
        if event.kind == INSERT:
            self._check_insert(event)
            delta = core_ops.insert(self.triple, event.point, self.universe)
        else:
            if event.point not in self.triple.xi_g:
                raise StateError(f"delete of inactive point {event.point!r}")
            delta = core_ops.delete(self.triple, event.point, self.universe)
        self.last_delta = delta
        previous = self.centers
        self.centers = select_centers(self.triple.xi_s, self.k, previous)
        diff = CenterDiff(self.centers - previous, previous - self.centers)
        self.step += 1
        self.recourse_log.append((event.kind, diff.swaps, diff.sym_diff))
        report = StepReport(
            step=self.step,
            event=event,
            centers=sorted(self.centers),
            added=sorted(diff.added),
            removed=sorted(diff.removed),
            swaps=diff.swaps,
            sym_diff=diff.sym_diff,
            size=len(self.triple),
            cost=self.current_cost(),
        )
        return diff, report

    def current_cost(self) -> float:
        return cost(self.points, sorted(self.centers), self.universe)

    def recourse_summary(self) -> RecourseSummary:
        out = RecourseSummary(steps=len(self.recourse_log))
        ins = [s for kind, s, _ in self.recourse_log if kind == INSERT]
        dels = [s for kind, s, _ in self.recourse_log if kind == DELETE]
        out.inserts, out.deletes = len(ins), len(dels)
        if ins:
            out.max_insert_swaps = max(ins)
            out.mean_insert_swaps = sum(ins) / len(ins)
        if dels:
            out.max_delete_swaps = max(dels)
            out.mean_delete_swaps = sum(dels) / len(dels)
        out.max_sym_diff = max((sd for _, _, sd in self.recourse_log), default=0)
        return out


def new_clusterer(universe: MetricUniverse, k: int) -> Clusterer:
    return Clusterer(universe, k)
