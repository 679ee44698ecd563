"""Per-step guarantee audits used by ``kcenter run --verify`` and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field

from .clusterer import INSERT, CenterDiff, Clusterer, UpdateEvent
from .forest import check_valid_triple, subtree_diameter_bound_check
from .ranks import check_maximality, check_separation, check_valid_tuple, ordered_rank

INSERT_MAX_SWAPS, INSERT_MAX_SYM_DIFF = 1, 2
DELETE_MAX_SWAPS, DELETE_MAX_SYM_DIFF = 2, 4


@dataclass
class AuditResult:
    verdicts: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def record(self, name: str, passed: bool, message: str = "") -> None:
        self.verdicts[name] = self.verdicts.get(name, True) and passed
        if not passed and message:
            self.messages.append(f"{name}: {message}")

    def to_dict(self) -> dict:
        out: dict = dict(self.verdicts)
        if self.messages:
            out["messages"] = list(self.messages)
        return out


def smooth_churn(
    before: dict[str, int], after: dict[str, int], event: UpdateEvent, levels: int
) -> list[str]:
    """Per-level smooth-rank crossings that exceed the update's allowance.

    Insertion: no pre-existing smooth rank may change.  Deletion: for each
    level ``h`` in ``[1, levels]`` at most one point (the deleted one
    included) crosses ``h`` downward and at most two cross upward.
    """
    problems = []
    if event.kind == INSERT:
        for p in sorted(before):
            if after.get(p) != before[p]:
                problems.append(f"insertion changed smooth rank of {p}: {before[p]} -> {after.get(p)}")
        return problems
    q = event.point
    for h in range(1, levels + 1):
        down = sum(1 for p, r in before.items() if r >= h and (p == q or after[p] < h))
        up = sum(1 for p, r in before.items() if p != q and r < h <= after[p])
        if down > 1:
            problems.append(f"level {h}: {down} downward crossings")
        if up > 2:
            problems.append(f"level {h}: {up} upward crossings")
    return problems


def check_recourse(event: UpdateEvent, diff: CenterDiff) -> str:
    if event.kind == INSERT:
        limits = INSERT_MAX_SWAPS, INSERT_MAX_SYM_DIFF
    else:
        limits = DELETE_MAX_SWAPS, DELETE_MAX_SYM_DIFF
    if diff.swaps > limits[0] or diff.sym_diff > limits[1]:
        return f"{event.kind} made {diff.swaps} swaps (sym diff {diff.sym_diff}), limit {limits[0]} ({limits[1]})"
    return ""


def check_center_rule(c: Clusterer) -> str:
    pts = set(c.triple.xi_s)
    centers = set(c.centers)
    if not centers <= pts:
        return f"centers {sorted(centers - pts)} are not active"
    if len(pts) <= c.k:
        return "" if centers == pts else "centers differ from P although |P| <= k"
    if len(centers) != c.k:
        return f"|centers| = {len(centers)} != k = {c.k}"
    cut = ordered_rank(c.triple.xi_s, c.k + 1)
    missing = sorted(p for p in pts if c.triple.xi_s[p] > cut and p not in centers)
    return f"points above the cut rank missing from centers: {missing}" if missing else ""


def audit_cheap(
    c: Clusterer, event: UpdateEvent, diff: CenterDiff, before_xi_s: dict[str, int], result: AuditResult
) -> None:
    msg = check_recourse(event, diff)
    result.record("recourse", not msg, msg)
    problems = smooth_churn(before_xi_s, c.triple.xi_s, event, c.universe.rank_cap)
    result.record("smooth_churn", not problems, "; ".join(problems))
    msg = check_center_rule(c)
    result.record("center_rule", not msg, msg)


def audit_structure(c: Clusterer, result: AuditResult) -> None:
    t, u = c.triple, c.universe
    pts = t.points()
    rep = check_valid_triple(t.forest, t.xi_g, t.xi_s, u)
    result.record("valid_triple", rep.ok, rep.summary())
    sep = check_separation(pts, t.xi_g, u)
    result.record("separation", not sep, f"violating pairs {sep[:5]}")
    mx = check_maximality(pts, t.xi_g, u)
    result.record("maximality", not mx, f"non-maximal points {mx[:5]}")
    cap_ok = not pts or max(t.xi_g.values()) >= u.rank_cap
    result.record("cap_witness", cap_ok, f"no point reaches rank cap {u.rank_cap}")
    tup = check_valid_tuple(pts, t.xi_g, t.xi_s, u)
    result.record("valid_tuple", tup.ok, tup.summary())
    sub = subtree_diameter_bound_check(t.forest, t.xi_g, u)
    result.record("subtree_bound", sub.ok, sub.summary())


def audit_step(
    c: Clusterer,
    event: UpdateEvent,
    diff: CenterDiff,
    before_xi_s: dict[str, int],
    structural: bool = True,
) -> AuditResult:
    result = AuditResult()
    audit_cheap(c, event, diff, before_xi_s, result)
    if structural:
        audit_structure(c, result)
    return result

