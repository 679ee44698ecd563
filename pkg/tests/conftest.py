import pytest

from consistent_kcenter import core_ops
from consistent_kcenter.core_ops import TripleState
from consistent_kcenter.metric import MetricUniverse

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def line_universe(points: dict, delta: int) -> MetricUniverse:
    """1-D Euclidean universe from ``{id: x}``."""
    return MetricUniverse.euclidean(delta, {p: [float(x)] for p, x in points.items()})


@pytest.fixture
def worked_universe():
    return line_universe({"p1": 0, "p2": 1, "p3": 4}, 8)


@pytest.fixture
def worked_state(worked_universe):
    """p1@0, p2@1, p3@4 inserted in that order with delta = 8."""
    s = TripleState()
    for p in ("p1", "p2", "p3"):
        core_ops.insert(s, p, worked_universe)
    return s


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split()[0])):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {name}: {detail}")
