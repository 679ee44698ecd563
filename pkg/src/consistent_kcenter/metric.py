"""Finite metric universes.

Two geometries are supported: Euclidean coordinates of any fixed dimension,
and an explicit distance matrix over a universe declared up front.  Every
distance the package ever compares against a power-of-two threshold goes
through :meth:`MetricUniverse.distance` or :meth:`MetricUniverse.distances`,
which evaluate the same floating-point expression in the same order, so the
scalar and vectorised paths agree bit for bit.
"""
from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, StateError, UnknownPointError
from .validation import ValidationReport

PointId = str

EUCLIDEAN = "euclidean"
MATRIX = "matrix"


def rank_cap(delta: int) -> int:
    """Return ``ceil(log2(delta)) + 1`` using integer arithmetic only."""
    if isinstance(delta, bool) or not isinstance(delta, (int, np.integer)):
        raise TypeError(f"delta must be an integer, got {delta!r}")
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    return (int(delta) - 1).bit_length() + 1


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance accumulated coordinate by coordinate.

    The vectorised methods of :class:`MetricUniverse` perform the identical
    sequence of IEEE operations, so both paths return the same bits.
    """
    s = 0.0
    for x, y in zip(a, b):
        t = x - y
        s += t * t
    return math.sqrt(s)


class MetricUniverse:
    """A named point set with a distance oracle and a diameter bound ``delta``.

    In Euclidean mode points may be registered incrementally (the stream
    carries coordinates with each insert); registering never changes an
    existing distance.  In matrix mode the universe is fixed at construction.
    """

    def __init__(self, delta: int, kind: str, dim: int | None = None):
        if kind not in (EUCLIDEAN, MATRIX):
            raise ValueError(f"unknown metric kind {kind!r}")
        self.delta = int(delta)
        self.rank_cap = rank_cap(delta)
        self.kind = kind
        self.dim = dim
        self._coords: dict[PointId, tuple[float, ...]] = {}
        self._index: dict[PointId, int] = {}
        self._matrix: np.ndarray | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def euclidean(
        cls,
        delta: int,
        points: Mapping[PointId, Sequence[float]] | None = None,
        dim: int | None = None,
    ) -> MetricUniverse:
        u = cls(delta, EUCLIDEAN, dim)
        for pid, xy in (points or {}).items():
            u.register(pid, xy)
        return u

    @classmethod
    def from_matrix(
        cls, delta: int, ids: Sequence[PointId], matrix: Sequence[Sequence[float]]
    ) -> MetricUniverse:
        ids = [str(p) for p in ids]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate point id in matrix universe")
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (len(ids), len(ids)):
            raise InputError(
                f"distance matrix has shape {m.shape}, expected {(len(ids), len(ids))}"
            )
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InputError("distance matrix entries must be finite and nonnegative")
        u = cls(delta, MATRIX)
        u._index = {p: i for i, p in enumerate(ids)}
        u._matrix = m
        return u

    def register(self, pid: PointId, coords: Sequence[float]) -> None:
        """Add a Euclidean point, or confirm it if already known with equal coordinates."""
        if self.kind != EUCLIDEAN:
            if pid not in self._index:
                raise UnknownPointError(f"point {pid!r} is not in the declared universe")
            return
        xy = tuple(float(c) for c in coords)
        if not all(math.isfinite(c) for c in xy):
            raise InputError(f"point {pid!r} has non-finite coordinates")
        if self.dim is None:
            self.dim = len(xy)
        elif len(xy) != self.dim:
            raise InputError(f"point {pid!r} has dimension {len(xy)}, expected {self.dim}")
        old = self._coords.get(pid)
        if old is not None and old != xy:
            raise StateError(f"point {pid!r} re-registered with different coordinates")
        self._coords[pid] = xy

    # -- queries ----------------------------------------------------------

    @property
    def points(self) -> tuple[PointId, ...]:
        src = self._coords if self.kind == EUCLIDEAN else self._index
        return tuple(sorted(src))

    def __contains__(self, pid: object) -> bool:
        return pid in (self._coords if self.kind == EUCLIDEAN else self._index)

    def __len__(self) -> int:
        return len(self._coords) if self.kind == EUCLIDEAN else len(self._index)

    def coords(self, pid: PointId) -> tuple[float, ...]:
        try:
            return self._coords[pid]
        except KeyError:
            raise UnknownPointError(f"unknown point {pid!r}") from None

    def _row(self, pid: PointId) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise UnknownPointError(f"unknown point {pid!r}") from None

    def distance(self, p: PointId, q: PointId) -> float:
        if self.kind == MATRIX:
            return float(self._matrix[self._row(p), self._row(q)])
        return euclidean_distance(self.coords(p), self.coords(q))

    def _coord_array(self, ids: Sequence[PointId]) -> np.ndarray:
        return np.array([self.coords(p) for p in ids], dtype=np.float64).reshape(
            len(ids), self.dim or 0
        )

    def distances(self, p: PointId, others: Sequence[PointId]) -> np.ndarray:
        """Distances from ``p`` to each of ``others``, as a float64 vector."""
        if self.kind == MATRIX:
            cols = [self._row(q) for q in others]
            return self._matrix[self._row(p), cols].astype(np.float64, copy=True)
        if not others:
            return np.zeros(0)
        x = self.coords(p)
        pts = self._coord_array(others)
        s = np.zeros(len(others))
        for j in range(pts.shape[1]):
            t = pts[:, j] - x[j]
            s += t * t
        return np.sqrt(s)

    def pairwise(self, ids: Sequence[PointId]) -> np.ndarray:
        """Full distance matrix among ``ids`` (in the given order)."""
        n = len(ids)
        if self.kind == MATRIX:
            rows = [self._row(q) for q in ids]
            return self._matrix[np.ix_(rows, rows)].astype(np.float64, copy=True)
        if n == 0:
            return np.zeros((0, 0))
        pts = self._coord_array(ids)
        s = np.zeros((n, n))
        for j in range(pts.shape[1]):
            t = pts[:, j][None, :] - pts[:, j][:, None]
            s += t * t
        return np.sqrt(s)

    def cross(self, rows: Sequence[PointId], cols: Sequence[PointId]) -> np.ndarray:
        """Distance matrix with ``rows`` x ``cols``."""
        if self.kind == MATRIX:
            r = [self._row(q) for q in rows]
            c = [self._row(q) for q in cols]
            return self._matrix[np.ix_(r, c)].astype(np.float64, copy=True)
        a, b = self._coord_array(rows), self._coord_array(cols)
        s = np.zeros((len(rows), len(cols)))
        for j in range(self.dim or 0):
            t = b[:, j][None, :] - a[:, j][:, None]
            s += t * t
        return np.sqrt(s)

    def matrix_rows(self) -> list[list[float]]:
        """The declared matrix as nested lists (matrix mode only)."""
        if self.kind != MATRIX:
            raise StateError("matrix_rows() needs a matrix universe")
        return self._matrix.tolist()

    def __repr__(self) -> str:
        return f"MetricUniverse(kind={self.kind!r}, delta={self.delta}, points={len(self)})"


def distance(u: MetricUniverse, p: PointId, q: PointId) -> float:
    return u.distance(p, q)


def validate_universe(
    u: MetricUniverse, active: Iterable[PointId] = (), triangle_tol: float = 1e-9
) -> ValidationReport:
    """Report every violated metric axiom and every active pair outside ``[1, delta]``.

    Symmetry, zero diagonal and the triangle inequality are checked over the
    whole declared universe in matrix mode; Euclidean geometry satisfies them
    by construction.  The triangle check allows a relative slack of
    ``triangle_tol`` so that matrices built from rounded float distances are
    not flagged.
    """
    report = ValidationReport()
    if u.kind == MATRIX:
        ids = u.points
        m = u.pairwise(ids)
        n = len(ids)
        for i in range(n):
            if m[i, i] != 0.0:
                report.add("diagonal", f"d({ids[i]},{ids[i]}) = {m[i, i]} != 0", ids[i])
        asym = np.argwhere(np.triu(m != m.T, 1))
        for i, j in asym:
            report.add(
                "asymmetry",
                f"d({ids[i]},{ids[j]}) = {m[i, j]} != d({ids[j]},{ids[i]}) = {m[j, i]}",
                ids[i],
                ids[j],
            )
        for b in range(n):
            via = m[:, b][:, None] + m[b, :][None, :]
            bad = np.argwhere(m > via + triangle_tol * np.maximum(via, 1.0))
            for a, c in bad:
                if a < c:
                    report.add(
                        "triangle",
                        f"d({ids[a]},{ids[c]}) = {m[a, c]} > "
                        f"d({ids[a]},{ids[b]}) + d({ids[b]},{ids[c]}) = {via[a, c]}",
                        ids[a],
                        ids[b],
                        ids[c],
                    )
    act = sorted(set(active))
    for p in act:
        if p not in u:
            report.add("unknown", f"active point {p!r} not in universe", p)
    act = [p for p in act if p in u]
    if len(act) > 1:
        m = u.pairwise(act)
        upper = np.triu(np.ones_like(m, dtype=bool), 1)
        for i, j in np.argwhere(upper & ((m < 1.0) | (m > u.delta))):
            d = m[i, j]
            if d < 1.0:
                report.add("min_distance", f"distance {d} < 1 between {act[i]} and {act[j]}", act[i], act[j])
            elif d > u.delta:
                report.add(
                    "max_distance",
                    f"distance {d} > delta={u.delta} between {act[i]} and {act[j]}",
                    act[i],
                    act[j],
                )
    return report
