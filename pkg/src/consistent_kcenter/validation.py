from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    witnesses: tuple[Any, ...] = ()


@dataclass
class ValidationReport:
    """Accumulates every violated condition found by a checker.

    An empty report means the checked property holds.
    """

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str, *witnesses: Any) -> None:
        self.violations.append(Violation(kind, detail, tuple(witnesses)))

    def extend(self, other: ValidationReport) -> None:
        self.violations.extend(other.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def summary(self, limit: int = 5) -> str:
        if self.ok:
            return "ok"
        lines = [f"{v.kind}: {v.detail}" for v in self.violations[:limit]]
        if len(self.violations) > limit:
            lines.append(f"... {len(self.violations) - limit} more")
        return "; ".join(lines)
