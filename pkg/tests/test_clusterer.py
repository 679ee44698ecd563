import pytest

from consistent_kcenter.clusterer import (
    CenterDiff,
    Clusterer,
    UpdateEvent,
    new_clusterer,
    select_centers,
)
from consistent_kcenter.errors import InputError, StateError
from consistent_kcenter.metric import MetricUniverse
from consistent_kcenter.oracle import brute_force_opt, cost
from consistent_kcenter.streams import generate_stream

from conftest import line_universe


def worked_clusterer():
    return new_clusterer(line_universe({"p1": 0, "p2": 1, "p3": 4}, 8), 1)


WORKED_EVENTS = [
    UpdateEvent.insert("p1"),
    UpdateEvent.insert("p2"),
    UpdateEvent.insert("p3"),
    UpdateEvent.delete("p1"),
]


def test_fresh_state():
    c = new_clusterer(line_universe({"a": 0, "b": 2}, 8), 2)
    assert c.points == [] and c.centers == frozenset()
    assert c.current_cost() == 0.0


def test_bad_k():
    u = line_universe({"a": 0}, 8)
    with pytest.raises(ValueError):
        Clusterer(u, 0)
    with pytest.raises(ValueError):
        Clusterer(u, True)


def test_invalid_universe_rejected():
    m = MetricUniverse.from_matrix(20, ["a", "b", "c"], [[0, 2, 10], [2, 0, 2], [10, 2, 0]])
    with pytest.raises(InputError):
        Clusterer(m, 1)


def test_equal_inputs_give_equal_states():
    a, b = worked_clusterer(), worked_clusterer()
    for e in WORKED_EVENTS:
        ra = a.apply_update(e)[1].to_dict()
        rb = b.apply_update(e)[1].to_dict()
        assert ra == rb
    assert a.triple.forest.dump() == b.triple.forest.dump()


def test_worked_stream_centers():
    c = worked_clusterer()
    seen = []
    for e in WORKED_EVENTS:
        diff, _ = c.apply_update(e)
        seen.append(sorted(c.centers))
    assert seen == [["p1"], ["p1"], ["p1"], ["p3"]]
    assert diff == CenterDiff(frozenset({"p3"}), frozenset({"p1"}))
    assert diff.swaps == 1 and diff.sym_diff == 2
    s = c.recourse_summary()
    assert (s.max_insert_swaps, s.max_delete_swaps) == (1, 1)
    assert (s.inserts, s.deletes, s.steps) == (3, 1, 4)


def test_insert_below_k_adds_point():
    c = new_clusterer(line_universe({"a": 0, "b": 2}, 8), 3)
    c.apply_update(UpdateEvent.insert("a"))
    diff, report = c.apply_update(UpdateEvent.insert("b"))
    assert diff.added == {"b"} and diff.removed == frozenset()
    assert diff.swaps == 1
    assert report.cost == 0.0


def test_cost_with_single_far_center():
    c = worked_clusterer()
    for e in WORKED_EVENTS[:3]:
        c.apply_update(e)
    c.centers = frozenset({"p3"})
    assert c.current_cost() == 4.0


def test_duplicate_and_missing_updates():
    c = worked_clusterer()
    c.apply_update(UpdateEvent.insert("p1"))
    with pytest.raises(StateError):
        c.apply_update(UpdateEvent.insert("p1"))
    with pytest.raises(StateError):
        c.apply_update(UpdateEvent.delete("p2"))


def test_distance_precondition():
    c = new_clusterer(line_universe({"a": 0}, 8), 1)
    c.apply_update(UpdateEvent.insert("a"))
    with pytest.raises(InputError):
        c.apply_update(UpdateEvent.insert("b", [0.5]))
    with pytest.raises(InputError):
        c.apply_update(UpdateEvent.insert("c", [9.0]))
    with pytest.raises(InputError):
        c.apply_update(UpdateEvent.insert("d"))


def test_select_prefers_previous_centers():
    xi = {"a": 2, "b": 2, "c": 2, "d": 0}
    assert select_centers(xi, 2, set()) == {"a", "b"}
    assert select_centers(xi, 2, {"c"}) == {"a", "c"}
    assert select_centers(xi, 2, {"b", "c"}) == {"b", "c"}
    assert select_centers(xi, 5, set()) == set(xi)


def test_step_report_key_order():
    c = worked_clusterer()
    _, report = c.apply_update(UpdateEvent.insert("p1"))
    assert list(report.to_dict()) == [
        "step", "event", "centers", "added", "removed", "swaps", "sym_diff", "size", "cost",
    ]


@pytest.mark.parametrize("mode", ["random", "adversarial-cycle", "sliding-window"])
@pytest.mark.parametrize("k", [1, 3])
def test_guarantees_on_small_streams(mode, k):
    stream = generate_stream(10, k, 16, mode=mode, seed=5)
    c = Clusterer(stream.header.universe(), k)
    for e in stream.events:
        diff, report = c.apply_update(e)
        assert diff.swaps <= (1 if e.kind == "insert" else 2)
        pts = c.points
        if len(pts) > k:
            assert report.cost <= 24 * brute_force_opt(pts, k, c.universe).value
            # every prefix of the smooth-rank order is good for its own k
            order = sorted(c.triple.xi_s, key=lambda p: (-c.triple.xi_s[p], p))
            for kk in range(1, len(pts)):
                centers = order[:kk]
                opt = brute_force_opt(pts, kk, c.universe).value
                assert cost(pts, centers, c.universe) <= 24 * opt
