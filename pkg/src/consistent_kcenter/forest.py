"""Leveled forest: a rooted forest whose leaves are the active points and in
which every leaf of a tree sits at the same depth.

Heights are stored per node and maintained by the mutators; the audit
functions at the bottom of this module recompute everything from parent
pointers and never trust the stored values.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import PreconditionError, StateError, UnknownPointError
from .metric import MetricUniverse, PointId
from .validation import ValidationReport

NodeId = int


@dataclass
class Node:
    id: NodeId
    height: int
    parent: NodeId | None = None
    children: list[NodeId] = field(default_factory=list)
    point: PointId | None = None


class LeveledForest:
    def __init__(self) -> None:
        self.nodes: dict[NodeId, Node] = {}
        self.leaf_of: dict[PointId, NodeId] = {}
        self._next_id = 0

    def _new_node(self, height: int, point: PointId | None = None) -> Node:
        node = Node(self._next_id, height, point=point)
        self._next_id += 1
        self.nodes[node.id] = node
        return node

    def copy(self) -> LeveledForest:
        return copy.deepcopy(self)

    # -- queries ----------------------------------------------------------

    def node(self, v: NodeId) -> Node:
        try:
            return self.nodes[v]
        except KeyError:
            raise UnknownPointError(f"unknown node {v}") from None

    def leaf(self, p: PointId) -> NodeId:
        try:
            return self.leaf_of[p]
        except KeyError:
            raise UnknownPointError(f"point {p!r} is not a leaf of the forest") from None

    def height(self, v: NodeId) -> int:
        return self.node(v).height

    def parent(self, v: NodeId) -> NodeId | None:
        return self.node(v).parent

    def children(self, v: NodeId) -> list[NodeId]:
        return list(self.node(v).children)

    def root_of(self, v: NodeId) -> NodeId:
        while (p := self.nodes[v].parent) is not None:
            v = p
        return v

    def roots(self) -> list[NodeId]:
        return sorted(v for v, n in self.nodes.items() if n.parent is None)

    def path_length(self, p: PointId) -> int:
        """Number of edges from the leaf of ``p`` to its root."""
        return self.height(self.root_of(self.leaf(p)))

    def ancestor_at_height(self, p: PointId, h: int) -> NodeId:
        if h < 0:
            raise PreconditionError(f"height must be nonnegative, got {h}")
        v = self.leaf(p)
        while self.nodes[v].height < h:
            parent = self.nodes[v].parent
            if parent is None:
                raise PreconditionError(
                    f"path from {p!r} to its root has length {self.nodes[v].height} < {h}"
                )
            v = parent
        return v

    def leaves_under(self, v: NodeId) -> Iterator[PointId]:
        stack = [v]
        while stack:
            node = self.nodes[stack.pop()]
            if node.point is not None:
                yield node.point
            stack.extend(node.children)

    def is_ancestor(self, a: NodeId, v: NodeId) -> bool:
        """True if ``a`` lies on the path from ``v`` to its root (inclusive)."""
        while v is not None:
            if v == a:
                return True
            v = self.nodes[v].parent
        return False

    def ordered_children(self, v: NodeId) -> list[NodeId]:
        """Children sorted by (minimum point id in the subtree, node id)."""
        return sorted(self.node(v).children, key=lambda c: (min(self.leaves_under(c)), c))

    def points(self) -> list[PointId]:
        return sorted(self.leaf_of)

    def __len__(self) -> int:
        return len(self.nodes)

    # -- mutators ---------------------------------------------------------

    def add_leaf_with_path(self, p: PointId, length: int) -> NodeId:
        """Add ``p`` as a new leaf topped by a fresh chain of ``length`` nodes; return the root."""
        if p in self.leaf_of:
            raise StateError(f"point {p!r} is already a leaf")
        if length < 0:
            raise PreconditionError(f"path length must be nonnegative, got {length}")
        leaf = self._new_node(0, point=p)
        self.leaf_of[p] = leaf.id
        below = leaf
        for h in range(1, length + 1):
            above = self._new_node(h)
            above.children.append(below.id)
            below.parent = above.id
            below = above
        return below.id

    def detach_edge(self, u: NodeId, v: NodeId, delete_v_if_childless: bool = False) -> None:
        nu, nv = self.node(u), self.node(v)
        if nu.parent != v:
            raise StateError(f"({u}, {v}) is not an edge")
        nu.parent = None
        nv.children.remove(u)
        if delete_v_if_childless and not nv.children:
            if nv.parent is not None:
                raise StateError(f"node {v} became childless but still has parent {nv.parent}")
            del self.nodes[v]

    def attach_new_parent(self, roots: Iterable[NodeId]) -> NodeId:
        roots = sorted(set(roots))
        if not roots:
            raise StateError("attach_new_parent needs at least one root")
        heights = set()
        for r in roots:
            n = self.node(r)
            if n.parent is not None:
                raise StateError(f"node {r} is not a root")
            heights.add(n.height)
        if len(heights) != 1:
            raise StateError(f"roots have unequal heights {sorted(heights)}")
        top = self._new_node(heights.pop() + 1)
        for r in roots:
            self.nodes[r].parent = top.id
            top.children.append(r)
        return top.id

    def remove_leaf(self, p: PointId) -> None:
        """Remove an isolated leaf (no parent)."""
        v = self.leaf(p)
        if self.nodes[v].parent is not None:
            raise StateError(f"leaf of {p!r} is not isolated")
        del self.nodes[v]
        del self.leaf_of[p]

    # -- serialisation ----------------------------------------------------

    def dump(self) -> str:
        """Deterministic text dump, one line per node in id order."""
        lines = []
        for v in sorted(self.nodes):
            n = self.nodes[v]
            parent = "-" if n.parent is None else str(n.parent)
            point = "-" if n.point is None else n.point
            lines.append(f"{v} h={n.height} parent={parent} point={point}")
        return "\n".join(lines) + ("\n" if lines else "")


# -- audits -----------------------------------------------------------------


def check_forest_structure(f: LeveledForest) -> ValidationReport:
    """Leveled-forest conditions and stored-height consistency, recomputed from scratch."""
    report = ValidationReport()
    nodes = f.nodes
    for v, n in nodes.items():
        if n.id != v:
            report.add("structure", f"node key {v} holds id {n.id}", v)
        if n.parent is not None:
            if n.parent not in nodes:
                report.add("structure", f"node {v} has dangling parent {n.parent}", v)
            elif v not in nodes[n.parent].children:
                report.add("structure", f"node {v} missing from children of {n.parent}", v)
        for c in n.children:
            if c not in nodes or nodes[c].parent != v:
                report.add("structure", f"child {c} of {v} does not point back", v, c)
        if n.point is None and not n.children:
            report.add("leaf_set", f"node {v} is a childless non-point node", v)
        if n.point is not None and n.children:
            report.add("leaf_set", f"point node {v} ({n.point}) has children", v)
        if v >= f._next_id:
            report.add("structure", f"node id {v} not below allocation counter", v)
    if not report.ok:
        return report
    point_nodes = {n.point: v for v, n in nodes.items() if n.point is not None}
    if point_nodes != f.leaf_of:
        report.add("leaf_set", "leaf_of does not match the point-carrying nodes")
    # depth from each root; detects cycles since a cycle has no root
    depth: dict[NodeId, int] = {}
    for r in (v for v, n in nodes.items() if n.parent is None):
        stack = [(r, 0)]
        leaf_depths = set()
        members = []
        while stack:
            v, dep = stack.pop()
            depth[v] = dep
            members.append(v)
            if not nodes[v].children:
                leaf_depths.add(dep)
            stack.extend((c, dep + 1) for c in nodes[v].children)
        if len(leaf_depths) > 1:
            report.add("equidistant", f"tree rooted at {r} has leaves at depths {sorted(leaf_depths)}", r)
            continue
        tree_depth = leaf_depths.pop()
        for v in members:
            if nodes[v].height != tree_depth - depth[v]:
                report.add(
                    "height",
                    f"node {v} stores height {nodes[v].height}, recomputed {tree_depth - depth[v]}",
                    v,
                )
    if len(depth) != len(nodes):
        report.add("cycle", f"{len(nodes) - len(depth)} nodes unreachable from any root")
    return report


def check_valid_triple(
    f: LeveledForest, xi_g: Mapping[PointId, int], xi_s: Mapping[PointId, int], u: MetricUniverse
) -> ValidationReport:
    """All five valid-triple conditions plus the leveled-forest structure.

    Conditions 3-5 are evaluated by walking up from each leaf: a leaf with
    rank ``r`` contributes to the ancestors of height at most ``r``.
    """
    from .ranks import check_separation

    report = check_forest_structure(f)
    if not report.ok:
        return report
    points = set(f.leaf_of)
    if set(xi_g) != points or set(xi_s) != points:
        report.add("domain", "rank function domains differ from the leaf set")
        return report
    for p, q in check_separation(points, xi_g, u):
        report.add("cond1_separation", f"{p} and {q} violate separation", p, q)

    nodes = f.nodes
    smooth_count: dict[NodeId, list[PointId]] = {v: [] for v in nodes}
    geo_edge: dict[NodeId, list[PointId]] = {v: [] for v in nodes if nodes[v].parent is not None}
    geo_at: dict[NodeId, list[PointId]] = {v: [] for v in nodes}
    for p in sorted(points):
        g, s = xi_g[p], xi_s[p]
        v = f.leaf_of[p]
        path = 0
        while True:
            h = nodes[v].height
            if s >= h:
                smooth_count[v].append(p)
            if g >= h:
                geo_at[v].append(p)
            parent = nodes[v].parent
            if parent is None:
                break
            if g >= nodes[parent].height:
                geo_edge[v].append(p)
            v = parent
            path += 1
        if g > path or s > path:
            report.add(
                "cond2_path_length",
                f"{p}: ranks (G={g}, S={s}) exceed path length {path}",
                p,
            )
    for v, holders in smooth_count.items():
        if len(holders) != 1:
            report.add(
                "cond3_smooth_holder",
                f"node {v} (h={nodes[v].height}) has {len(holders)} smooth holders {holders}",
                v,
                *holders,
            )
    for c, holders in geo_edge.items():
        if len(holders) != 1:
            parent = nodes[c].parent
            report.add(
                "cond4_geometric_holder",
                f"edge ({c},{parent}) has {len(holders)} geometric holders {holders}",
                c,
                parent,
                *holders,
            )
    for v, holders in geo_at.items():
        if len(holders) < 2:
            continue
        limit = 2.0 ** (nodes[v].height + 1)
        d = u.pairwise(holders)
        for i in range(len(holders)):
            for j in range(i + 1, len(holders)):
                if not d[i, j] < limit:
                    report.add(
                        "cond5_subtree_distance",
                        f"{holders[i]},{holders[j]} under node {v}: d={d[i, j]} >= {limit}",
                        v,
                        holders[i],
                        holders[j],
                    )
    return report


def subtree_diameter_bound_check(
    f: LeveledForest, xi_g: Mapping[PointId, int], u: MetricUniverse
) -> ValidationReport:
    """For each node ``v`` and leaves ``q, p`` under it with ``xi_g(q) >= h(v)``:
    ``d(q, p) <= 4 * 2**h(v) - 4``."""
    report = ValidationReport()
    nodes = f.nodes
    anchors: dict[NodeId, list[PointId]] = {}
    for p, leaf in f.leaf_of.items():
        g = xi_g[p]
        v = leaf
        while v is not None and nodes[v].height <= g:
            anchors.setdefault(v, []).append(p)
            v = nodes[v].parent
    for v in sorted(anchors):
        h = nodes[v].height
        if h == 0:
            continue
        bound = 4.0 * 2.0**h - 4.0
        qs = sorted(anchors[v])
        ps = sorted(f.leaves_under(v))
        d = u.cross(qs, ps)
        for i, j in zip(*(d > bound).nonzero()):
            report.add(
                "subtree_diameter",
                f"d({qs[i]},{ps[j]}) = {d[i, j]} > {bound} under node {v} (h={h})",
                v,
                qs[i],
                ps[j],
            )
    return report
