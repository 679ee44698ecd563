import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from consistent_kcenter.cli import main, oracle_entry, run_stream
from consistent_kcenter.clusterer import Clusterer, UpdateEvent

from conftest import line_universe

DATA = Path(__file__).parent / "data"
WORKED = DATA / "worked.jsonl"
HEADER = '{"type": "header", "k": 1, "delta": 8, "metric": "euclidean", "dim": 1}\n'


def run_text(text, **kw):
    out, err = io.StringIO(), io.StringIO()
    code = run_stream(io.StringIO(text), out, err=err, **kw)
    return code, [json.loads(line) for line in out.getvalue().splitlines()], err.getvalue()


def test_worked_stream_golden(tmp_path):
    report = tmp_path / "r.jsonl"
    assert main(["run", "--stream", str(WORKED), "--verify", "--oracle", "exact", "--report", str(report)]) == 0
    assert report.read_bytes() == (DATA / "worked_reports.jsonl").read_bytes()
    rows = [json.loads(x) for x in report.read_text().splitlines()]
    assert len(rows) == 4
    assert rows[-1]["centers"] == ["p3"]
    assert all(all(v for k, v in r["audit"].items()) for r in rows)
    assert all(r["oracle"].get("ratio", 0) <= 24 for r in rows)


def test_header_only_stream():
    code, rows, _ = run_text(HEADER, verify=True)
    assert code == 0 and rows == []


def test_parse_error_exit_and_line():
    code, rows, err = run_text(HEADER + '{"type": "insert", "id": "p1", "coords": [0]}\n{oops\n')
    assert code == 2
    assert len(rows) == 1
    assert "line 3" in err


def test_delete_absent_id():
    code, rows, err = run_text(HEADER + '{"type": "delete", "id": "ghost"}\n')
    assert code == 3
    assert rows == []
    assert "line 2" in err and "ghost" in err


def test_distance_violation_is_precondition_error():
    text = HEADER + '{"type": "insert", "id": "a", "coords": [0]}\n{"type": "insert", "id": "b", "coords": [0.25]}\n'
    code, _, err = run_text(text)
    assert code == 3
    assert "line 3" in err


def test_invalid_universe_header():
    hdr = {
        "type": "header", "k": 1, "delta": 20, "metric": "matrix",
        "points": {"ids": ["a", "b", "c"], "matrix": [[0, 2, 10], [2, 0, 2], [10, 2, 0]]},
    }
    code, _, err = run_text(json.dumps(hdr) + "\n")
    assert code == 3
    assert "triangle" in err


def test_violation_exit_code():
    # a cost far above any feasible optimum forces the exact check to fail
    c = Clusterer(line_universe({"a": 0, "b": 1, "c": 4}, 8), 1)
    for p in "abc":
        c.apply_update(UpdateEvent.insert(p))
    entry, msg = oracle_entry(c, "exact", cost=1000.0)
    assert entry["verdict"] == "fail" and msg


def test_gonzalez_verdicts():
    c = Clusterer(line_universe({"a": 0, "b": 1, "c": 4}, 8), 1)
    for p in "abc":
        c.apply_update(UpdateEvent.insert(p))
    g = 4.0  # gonzalez from a
    assert oracle_entry(c, "gonzalez", cost=g)[0]["verdict"] == "pass"
    assert oracle_entry(c, "gonzalez", cost=13 * g)[0]["verdict"] == "inconclusive"
    assert oracle_entry(c, "gonzalez", cost=25 * g)[0]["verdict"] == "fail"


def test_exact_falls_back_to_gonzalez():
    c = Clusterer(line_universe({"a": 0, "b": 1, "c": 4}, 8), 1)
    for p in "abc":
        c.apply_update(UpdateEvent.insert(p))
    entry, _ = oracle_entry(c, "exact", cost=4.0, cap=1)
    assert entry["method"] == "gonzalez"


@pytest.mark.parametrize("mode", ["insert-only", "sliding-window", "adversarial-cycle", "random"])
def test_gen_then_run_verify(tmp_path, mode):
    stream = tmp_path / "s.jsonl"
    assert main(["gen", "--n", "12", "--k", "2", "--delta", "64", "--mode", mode, "--seed", "3", "--out", str(stream)]) == 0
    report = tmp_path / "r.jsonl"
    code = main(["run", "--stream", str(stream), "--verify", "--oracle", "exact", "--report", str(report)])
    assert code == 0
    assert report.read_text().count("\n") == len(stream.read_text().splitlines()) - 1


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["gen", "--n", "15", "--k", "3", "--delta", "64", "--mode", "random", "--seed", "42"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_infeasible(capsys):
    assert main(["gen", "--n", "50", "--k", "2", "--delta", "4", "--dim", "1"]) == 3
    assert "generation error" in capsys.readouterr().err


def test_audit_every_marks_structural_steps(tmp_path):
    stream = tmp_path / "s.jsonl"
    main(["gen", "--n", "10", "--k", "2", "--delta", "64", "--mode", "insert-only", "--out", str(stream)])
    code, rows, _ = run_text(stream.read_text(), verify=True, audit_every=3)
    assert code == 0
    assert ["valid_triple" in r["audit"] for r in rows] == [r["step"] % 3 == 0 for r in rows]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "consistent_kcenter", "run", "--stream", str(WORKED)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 4


def test_missing_stream_file(tmp_path):
    assert main(["run", "--stream", str(tmp_path / "nope.jsonl")]) == 2
