"""JSON Lines update streams: parsing, serialisation and synthetic generation.

A stream is one header line followed by one event per line::

    {"type": "header", "k": 1, "delta": 8, "metric": "euclidean", "dim": 1}
    {"type": "insert", "id": "p1", "coords": [0.0]}
    {"type": "delete", "id": "p1"}

Matrix streams declare the whole universe in the header as
``"points": {"ids": [...], "matrix": [[...], ...]}`` and their inserts carry
no coordinates.  Euclidean headers may optionally declare extra candidate
points as ``"points": [{"id": ..., "coords": [...]}, ...]``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

from .clusterer import DELETE, INSERT, UpdateEvent
from .errors import InputError, StreamParseError
from .metric import EUCLIDEAN, MATRIX, MetricUniverse, euclidean_distance

MODES = ("insert-only", "sliding-window", "adversarial-cycle", "random")


@dataclass
class StreamHeader:
    k: int
    delta: int
    metric: str = EUCLIDEAN
    dim: int | None = None
    points: list | dict | None = None

    def to_dict(self) -> dict:
        out = {"type": "header", "k": self.k, "delta": self.delta, "metric": self.metric}
        if self.dim is not None:
            out["dim"] = self.dim
        if self.points is not None:
            out["points"] = self.points
        return out

    def universe(self) -> MetricUniverse:
        if self.metric == MATRIX:
            return MetricUniverse.from_matrix(self.delta, self.points["ids"], self.points["matrix"])
        declared = {str(p["id"]): p["coords"] for p in (self.points or [])}
        return MetricUniverse.euclidean(self.delta, declared, dim=self.dim)


@dataclass
class Stream:
    header: StreamHeader
    events: list[UpdateEvent] = field(default_factory=list)

    def dumps(self) -> str:
        return "".join(line + "\n" for line in iter_lines(self))


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(", ", ": "), allow_nan=False)


def iter_lines(stream: Stream) -> Iterator[str]:
    yield _dump(stream.header.to_dict())
    for e in stream.events:
        yield _dump(e.to_dict())


def write_stream(stream: Stream, out: Path | str | IO[str]) -> None:
    if isinstance(out, (str, Path)):
        Path(out).write_text(stream.dumps(), encoding="utf-8")
    else:
        out.write(stream.dumps())


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_header(obj, lineno: int = 1) -> StreamHeader:
    if not isinstance(obj, dict) or obj.get("type") != "header":
        raise StreamParseError(lineno, "first line must be a header object")
    k, delta, metric = obj.get("k"), obj.get("delta"), obj.get("metric", EUCLIDEAN)
    if not _is_int(k) or k < 1:
        raise StreamParseError(lineno, f"header k must be a positive integer, got {k!r}")
    if not _is_int(delta) or delta < 1:
        raise StreamParseError(lineno, f"header delta must be a positive integer, got {delta!r}")
    if metric not in (EUCLIDEAN, MATRIX):
        raise StreamParseError(lineno, f"unknown metric {metric!r}")
    dim = obj.get("dim")
    if dim is not None and (not _is_int(dim) or dim < 1):
        raise StreamParseError(lineno, f"dim must be a positive integer, got {dim!r}")
    points = obj.get("points")
    if metric == MATRIX:
        if not isinstance(points, dict) or "ids" not in points or "matrix" not in points:
            raise StreamParseError(lineno, "matrix header needs points: {ids, matrix}")
    elif points is not None:
        if not isinstance(points, list) or not all(
            isinstance(p, dict) and "id" in p and isinstance(p.get("coords"), list) for p in points
        ):
            raise StreamParseError(lineno, "euclidean header points must be a list of {id, coords}")
    return StreamHeader(k, delta, metric, dim, points)


def parse_event(obj, lineno: int, metric: str = EUCLIDEAN) -> UpdateEvent:
    if not isinstance(obj, dict):
        raise StreamParseError(lineno, "event must be a JSON object")
    kind = obj.get("type")
    pid = obj.get("id")
    if kind not in (INSERT, DELETE):
        raise StreamParseError(lineno, f"unknown event type {kind!r}")
    if not isinstance(pid, str) or not pid:
        raise StreamParseError(lineno, f"event id must be a nonempty string, got {pid!r}")
    if kind == DELETE:
        return UpdateEvent.delete(pid)
    coords = obj.get("coords")
    if coords is not None:
        if not isinstance(coords, list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in coords
        ):
            raise StreamParseError(lineno, "coords must be a list of numbers")
    return UpdateEvent.insert(pid, coords)


def read_stream(lines) -> Iterator[tuple[int, StreamHeader | UpdateEvent]]:
    """Lazily parse an iterable of lines, yielding ``(lineno, header_or_event)``.

    Blank lines are skipped.  The first non-blank line must be the header.
    """
    header = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamParseError(lineno, f"invalid JSON: {exc.msg}") from None
        if header is None:
            header = parse_header(obj, lineno)
            yield lineno, header
        else:
            if isinstance(obj, dict) and obj.get("type") == "header":
                raise StreamParseError(lineno, "duplicate header")
            yield lineno, parse_event(obj, lineno, header.metric)
    if header is None:
        raise StreamParseError(0, "empty stream: missing header")


def loads(text: str) -> Stream:
    it = read_stream(text.splitlines())
    _, header = next(it)
    return Stream(header, [e for _, e in it])


def load_stream(path: Path | str) -> Stream:
    return loads(Path(path).read_text(encoding="utf-8"))


# -- generation -------------------------------------------------------------


class GenerationError(InputError):
    pass


def _round(xs, digits=4):
    return [round(x, digits) for x in xs]


def _sample_pool(
    rng: random.Random, n: int, delta: int, dim: int, center: list[float], radius: float, existing=()
) -> list[list[float]]:
    """Rejection-sample ``n`` points in a ball, pairwise at least 1 apart."""
    pts = list(existing)
    out = []
    attempts = 0
    limit = 2000 * (n + 10)
    while len(out) < n:
        attempts += 1
        if attempts > limit:
            raise GenerationError(
                f"could not place {n} points with min distance 1 inside radius {radius} (delta={delta})"
            )
        x = [rng.uniform(-radius, radius) for _ in range(dim)]
        if sum(c * c for c in x) > radius * radius:
            continue
        x = _round([a + b for a, b in zip(x, center)])
        if all(1.0 <= euclidean_distance(x, y) for y in pts):
            pts.append(x)
            out.append(x)
    return out


def generate_stream(
    n: int,
    k: int,
    delta: int,
    mode: str = "random",
    seed: int = 0,
    dim: int = 2,
    steps: int | None = None,
    window: int | None = None,
    cycles: int | None = None,
    metric: str = EUCLIDEAN,
) -> Stream:
    """Seeded synthetic stream over a pool of ``n`` points.

    All pool points lie in a ball of diameter ``delta`` (minus a margin for
    rounding) and are pairwise at least 1 apart, so every active set is
    admissible.  ``steps`` is the event count in random mode (default ``4n``);
    ``window`` the active-set size in sliding-window mode (default
    ``max(k + 1, n // 4)``); ``cycles`` the number of toggles of the far point
    in adversarial-cycle mode (default ``n``).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    if n < 1 or k < 1 or delta < 1 or dim < 1:
        raise ValueError("n, k, delta and dim must be positive")
    rng = random.Random(seed)
    radius = delta / 2 - 1e-3
    if n > 1 and radius < 0.5:
        raise GenerationError(f"delta={delta} cannot hold {n} points at distance >= 1")
    width = len(str(n))
    names = [f"p{i:0{width}d}" for i in range(n)]

    if mode == "adversarial-cycle":
        far = [radius] + [0.0] * (dim - 1)
        base_center = [-radius / 2] + [0.0] * (dim - 1)
        base = _sample_pool(rng, n - 1, delta, dim, base_center, radius / 2, existing=[far])
        coords = base + [_round(far)]
    else:
        coords = _sample_pool(rng, n, delta, dim, [0.0] * dim, radius)

    for i in range(n):
        for j in range(i + 1, n):
            d = euclidean_distance(coords[i], coords[j])
            if not 1.0 <= d <= delta:
                raise GenerationError(f"pool pair {names[i]},{names[j]} at distance {d}")

    events: list[UpdateEvent] = []
    ins = lambda i: UpdateEvent.insert(names[i], None if metric == MATRIX else coords[i])
    rem = lambda i: UpdateEvent.delete(names[i])

    if mode == "insert-only":
        events = [ins(i) for i in range(n)]
    elif mode == "sliding-window":
        w = window if window is not None else max(k + 1, n // 4)
        active: list[int] = []
        for i in range(n):
            if len(active) >= w:
                events.append(rem(active.pop(0)))
            events.append(ins(i))
            active.append(i)
    elif mode == "adversarial-cycle":
        m = cycles if cycles is not None else n
        events = [ins(i) for i in range(n - 1)]
        for _ in range(m):
            events.append(ins(n - 1))
            events.append(rem(n - 1))
    else:
        total = steps if steps is not None else 4 * n
        active_set: set[int] = set()
        inactive = list(range(n))
        for _ in range(total):
            grow = not active_set or (inactive and rng.random() < 0.5 + 0.3 * (len(inactive) / n - 0.5))
            if grow:
                i = inactive.pop(rng.randrange(len(inactive)))
                active_set.add(i)
                events.append(ins(i))
            else:
                i = rng.choice(sorted(active_set))
                active_set.remove(i)
                inactive.append(i)
                events.append(rem(i))

    if metric == MATRIX:
        u = MetricUniverse.euclidean(delta, dict(zip(names, coords)))
        header = StreamHeader(
            k, delta, MATRIX, None, {"ids": names, "matrix": u.pairwise(names).tolist()}
        )
    else:
        header = StreamHeader(
            k, delta, EUCLIDEAN, dim, [{"id": p, "coords": c} for p, c in zip(names, coords)]
        )
    return Stream(header, events)
