import pytest

from consistent_kcenter.errors import PreconditionError, StateError
from consistent_kcenter.forest import (
    LeveledForest,
    check_forest_structure,
    check_valid_triple,
    subtree_diameter_bound_check,
)

from conftest import line_universe

WORKED_DUMP = """\
0 h=0 parent=1 point=p1
1 h=1 parent=2 point=-
2 h=2 parent=3 point=-
3 h=3 parent=4 point=-
4 h=4 parent=- point=-
5 h=0 parent=- point=p2
6 h=0 parent=7 point=p3
7 h=1 parent=8 point=-
8 h=2 parent=- point=-
"""


def test_leaf_height_and_path_height():
    f = LeveledForest()
    root = f.add_leaf_with_path("p1", 4)
    assert f.height(f.leaf("p1")) == 0
    assert f.height(root) == 4
    assert f.path_length("p1") == 4


def test_ancestor_at_height():
    f = LeveledForest()
    f.add_leaf_with_path("p1", 4)
    assert f.ancestor_at_height("p1", 0) == f.leaf("p1")
    v = f.ancestor_at_height("p1", 3)
    assert f.height(v) == 3
    assert f.is_ancestor(v, f.leaf("p1"))
    with pytest.raises(PreconditionError):
        f.ancestor_at_height("p1", 5)


def test_empty_path_makes_isolated_leaf():
    f = LeveledForest()
    root = f.add_leaf_with_path("p", 0)
    assert root == f.leaf("p")
    assert f.roots() == [root]


def test_two_paths_are_disjoint_trees():
    f = LeveledForest()
    r1 = f.add_leaf_with_path("a", 2)
    r2 = f.add_leaf_with_path("b", 3)
    assert r1 != r2
    assert f.roots() == [r1, r2]
    assert list(f.leaves_under(r1)) == ["a"]
    assert check_forest_structure(f).ok


def test_duplicate_leaf():
    f = LeveledForest()
    f.add_leaf_with_path("a", 1)
    with pytest.raises(StateError):
        f.add_leaf_with_path("a", 0)


def test_detach_edge_twice():
    f = LeveledForest()
    f.add_leaf_with_path("a", 1)
    leaf = f.leaf("a")
    top = f.parent(leaf)
    f.detach_edge(leaf, top)
    with pytest.raises(StateError):
        f.detach_edge(leaf, top)


def test_detach_deletes_childless_root():
    f = LeveledForest()
    f.add_leaf_with_path("a", 1)
    leaf = f.leaf("a")
    top = f.parent(leaf)
    f.detach_edge(leaf, top, delete_v_if_childless=True)
    assert top not in f.nodes
    assert f.roots() == [leaf]


def test_attach_single_root():
    f = LeveledForest()
    f.add_leaf_with_path("p2", 0)
    r = f.attach_new_parent([f.leaf("p2")])
    assert f.height(r) == 1


def test_attach_fan_in():
    f = LeveledForest()
    a = f.add_leaf_with_path("a", 2)
    b = f.add_leaf_with_path("b", 2)
    r = f.attach_new_parent([a, b])
    assert f.height(r) == 3
    assert f.roots() == [r]
    assert sorted(f.leaves_under(r)) == ["a", "b"]


def test_attach_unequal_heights():
    f = LeveledForest()
    a = f.add_leaf_with_path("a", 1)
    b = f.add_leaf_with_path("b", 2)
    with pytest.raises(StateError):
        f.attach_new_parent([a, b])


def test_ordered_children_by_min_leaf():
    f = LeveledForest()
    b = f.add_leaf_with_path("b", 1)
    a = f.add_leaf_with_path("a", 1)
    r = f.attach_new_parent([b, a])
    assert f.ordered_children(r) == [a, b]


def test_empty_forest_is_valid():
    f = LeveledForest()
    assert check_valid_triple(f, {}, {}, line_universe({}, 8)).ok


def test_worked_state_is_valid(worked_state, worked_universe):
    t = worked_state
    assert check_valid_triple(t.forest, t.xi_g, t.xi_s, worked_universe).ok


def test_worked_forest_dump_golden(worked_state):
    assert worked_state.forest.dump() == WORKED_DUMP


def test_corrupt_smooth_rank_breaks_condition_two(worked_state, worked_universe):
    t = worked_state
    xi_s = dict(t.xi_s, p2=1)
    rep = check_valid_triple(t.forest, t.xi_g, xi_s, worked_universe)
    assert "cond2_path_length" in rep.kinds()
    assert any(v.witnesses == ("p2",) for v in rep if v.kind == "cond2_path_length")


def test_two_smooth_holders_break_condition_three():
    f = LeveledForest()
    a = f.add_leaf_with_path("a", 0)
    b = f.add_leaf_with_path("b", 0)
    f.attach_new_parent([a, b])
    u = line_universe({"a": 0, "b": 2}, 8)
    rep = check_valid_triple(f, {"a": 1, "b": 0}, {"a": 1, "b": 1}, u)
    assert "cond3_smooth_holder" in rep.kinds()


def test_condition_five_detects_far_pair():
    f = LeveledForest()
    a = f.add_leaf_with_path("a", 0)
    b = f.add_leaf_with_path("b", 0)
    f.attach_new_parent([a, b])
    u = line_universe({"a": 0, "b": 5}, 8)
    rep = check_valid_triple(f, {"a": 1, "b": 1}, {"a": 1, "b": 0}, u)
    assert "cond5_subtree_distance" in rep.kinds()


def test_structure_detects_uneven_leaves():
    f = LeveledForest()
    top = f.add_leaf_with_path("a", 2)
    f.add_leaf_with_path("b", 0)
    leaf_b = f.leaf("b")
    f.nodes[leaf_b].parent = top
    f.nodes[top].children.append(leaf_b)
    assert "equidistant" in check_forest_structure(f).kinds()


@pytest.mark.parametrize("h,bound", [(1, 4.0), (4, 60.0)])
def test_subtree_bound_values(h, bound):
    assert 4.0 * 2.0**h - 4.0 == bound


def test_subtree_bound_single_leaf():
    f = LeveledForest()
    f.add_leaf_with_path("a", 3)
    u = line_universe({"a": 0}, 8)
    assert subtree_diameter_bound_check(f, {"a": 3}, u).ok


def test_subtree_bound_violation():
    f = LeveledForest()
    a = f.add_leaf_with_path("a", 0)
    b = f.add_leaf_with_path("b", 0)
    f.attach_new_parent([a, b])
    u = line_universe({"a": 0, "b": 5}, 8)
    rep = subtree_diameter_bound_check(f, {"a": 1, "b": 0}, u)
    assert rep.kinds() == {"subtree_diameter"}


def test_worked_subtree_bound(worked_state, worked_universe):
    assert subtree_diameter_bound_check(worked_state.forest, worked_state.xi_g, worked_universe).ok


def test_copy_is_independent(worked_state):
    f = worked_state.forest.copy()
    f.remove_leaf("p2")
    assert "p2" in worked_state.forest.leaf_of
    assert f.dump() != worked_state.forest.dump()
