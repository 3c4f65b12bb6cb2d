from __future__ import annotations

import csv
import io
import json
import subprocess

import numpy as np
import pytest

from pencil_lab.cli import EXIT_FAIL, EXIT_INVALID, EXIT_OK, EXIT_SIZE, main
from pencil_lab.fixtures import fixture_names, load_fixture


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fixtures_listing(capsys):
    code, out, _ = run(capsys, "fixtures")
    assert code == EXIT_OK
    names = [f["name"] for f in json.loads(out)["fixtures"]]
    assert names == fixture_names()


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--fixture", "generic-odd-5")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["tag"] == "Generic" and rep["N"] == 5 and rep["q"] == 7


def test_count_csv_for_odd_shape(capsys):
    code, out, _ = run(capsys, "count", "--fixture", "regular-odd-5-shape-221", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK
    assert rows[0] == ["profile", "count", "expected", "pass"]
    assert {r[0]: int(r[1]) for r in rows[1:]} == {"(0,0,0)": 4, "(0,1,0)": 2, "(1,0,0)": 2, "(1,1,0)": 1}


def test_even_count_reports_signed_and_distinct(capsys):
    code, out, _ = run(capsys, "count", "--fixture", "even-terminal-22")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["signed"]
    assert [r["count"] for r in rep["rows"]] == [4]
    assert rep["distinct"] == {"(0,0)": 2}
    assert rep["excluded"] == {"(1,1)": 6}


@pytest.mark.parametrize("cmd", ["count", "verify", "reduce"])
@pytest.mark.parametrize("name", fixture_names())
def test_every_fixture_passes_every_check(capsys, cmd, name):
    code, out, err = run(capsys, cmd, "--fixture", name, "--samples", "30")
    assert code == EXIT_OK, err
    rep = json.loads(out)
    assert rep.get("pass", True)
    assert all(c["pass"] for c in rep.get("checks", []))


def test_output_is_deterministic(capsys):
    first = run(capsys, "verify", "--fixture", "nodal-even-6", "--samples", "25", "--seed", "4")[1]
    second = run(capsys, "verify", "--fixture", "nodal-even-6", "--samples", "25", "--seed", "4")[1]
    assert first == second


def test_pencil_file_input(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(load_fixture("generic-even-4").to_json()))
    code, out, _ = run(capsys, "count", "--pencil", str(path))
    assert code == EXIT_OK and json.loads(out)["source"] == "p.json"
    code, _, err = run(capsys, "count", "--pencil", str(path), "--q", "11")
    assert code == EXIT_INVALID and "disagrees" in err


def _write(tmp_path, A1, A2, q=7):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"field": {"p": q, "k": 1, "modulus": [0, 1]}, "A1": A1, "A2": A2}))
    return str(path)


def test_invalid_inputs_exit_two(capsys, tmp_path):
    singular = _write(tmp_path, np.diag([1, 1, 0]).tolist(), np.diag([1, 2, 3]).tolist())
    assert run(capsys, "classify", "--pencil", singular)[0] == EXIT_INVALID
    asym = _write(tmp_path, [[1, 2, 0], [0, 1, 0], [0, 0, 1]], np.eye(3, dtype=int).tolist())
    assert run(capsys, "classify", "--pencil", asym)[0] == EXIT_INVALID
    codes = _write(tmp_path, np.diag([1, 9, 1]).tolist(), np.eye(3, dtype=int).tolist())
    assert run(capsys, "classify", "--pencil", codes)[0] == EXIT_INVALID
    assert run(capsys, "count", "--pencil", str(tmp_path / "missing.json"))[0] == EXIT_INVALID
    assert run(capsys, "count", "--fixture", "no-such")[0] == EXIT_INVALID
    assert run(capsys, "count", "--fixture", "generic-odd-3", "--samples", "-1")[0] == EXIT_INVALID
    assert run(capsys, "count", "--fixture", "generic-odd-3", "--q", "3000")[0] == EXIT_INVALID


def test_size_guard_exits_three(capsys, tmp_path):
    big = _write(tmp_path, np.eye(9, dtype=int).tolist(), np.diag(range(9)).tolist(), q=11)
    assert run(capsys, "classify", "--pencil", big)[0] == EXIT_SIZE
    assert run(capsys, "classify", "--pencil", big, "--force")[0] == EXIT_OK


def test_reducible_fixture_skips_group_checks(capsys):
    code, out, err = run(capsys, "verify", "--fixture", "even-terminal-22")
    assert code == EXIT_OK


def test_samples_zero_keeps_only_exhaustive_checks(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "generic-even-6", "--samples", "0")
    names = [c["check"] for c in json.loads(out)["checks"]]
    assert code == EXIT_OK
    assert "commutation" not in names and any(n.startswith("orbit") for n in names)


def test_console_script():
    res = subprocess.run(["pencil-lab", "classify", "--fixture", "generic-odd-3", "--format", "csv"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == EXIT_OK
    assert res.stdout.splitlines()[0] == "tag,disc_square,f"


def test_failed_check_exits_one(capsys, monkeypatch):
    import pencil_lab.cli as cli

    monkeypatch.setattr(cli, "expected_odd_class_size", lambda key: 3)
    code, out, _ = run(capsys, "count", "--fixture", "generic-odd-3")
    assert code == EXIT_FAIL and json.loads(out)["pass"] is False


def test_degenerate_fixture_exits_one(capsys, monkeypatch):
    import pencil_lab.cli as cli
    from pencil_lab.errors import FixtureDegenerate

    def boom(*_a, **_k):
        raise FixtureDegenerate("kernel is not one-dimensional")

    monkeypatch.setattr(cli, "terminal_even_solver", boom)
    code, out, _ = run(capsys, "reduce", "--fixture", "even-terminal-112")
    failed = [c for c in json.loads(out)["checks"] if not c["pass"]]
    assert code == EXIT_FAIL
    assert [c["check"] for c in failed] == ["terminal solver"] and "kernel" in failed[0]["error"]
