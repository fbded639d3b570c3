import csv
import io
import json
import subprocess
import sys

import pytest

from nonvanishing import cli
from nonvanishing.errors import ConvergenceError


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_reproduce_bound_json(capsys):
    code, out, _ = run(capsys, "reproduce-bound", "--emit-json", "--threads", "1")
    assert code == 0
    rec = json.loads(out)
    assert rec["command"] == "reproduce-bound"
    assert rec["config"]["S"] == pytest.approx(3.14159265358979 / 0.72)
    assert 0.77 <= rec["result"]["c"] <= 0.81
    assert rec["result"]["one_minus_c"] >= 0.19


def test_json_floats_have_17_digits():
    assert cli._json(0.1) == "0.10000000000000001"
    assert cli._json(2.0) == "2.0"
    assert cli._json(1j) == '{"re": 0.0, "im": 1.0}'
    assert cli._json(float("nan")) == "null"
    assert cli.fmt(1 / 3) == "0.33333333333333331"


def test_output_is_deterministic(capsys):
    a = run(capsys, "ks", "--emit-json", "--threads", "1")[1]
    b = run(capsys, "ks", "--emit-json", "--threads", "1")[1]
    assert a == b and json.loads(a)["result"]


def test_scan_csv(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--R", "6.8", "--b", "0.6,0.64", "--threads", "1", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 2
    assert any(r["pinned"] == "true" for r in rows)
    float(rows[0]["c"])


def test_selberg_demo_and_afe(capsys):
    assert run(capsys, "selberg-demo", "--threads", "1")[0] == 0
    code, out, _ = run(capsys, "afe-check", "--cases", "3", "--d-max", "30", "--threads", "1")
    assert code == 0
    assert out.splitlines()[0].startswith("d,delta1_re")


def test_verify_chowla_small(capsys):
    code, out, _ = run(capsys, "verify-chowla", "--max", "60", "--threads", "1", "--emit-json")
    assert code == 0
    rec = json.loads(out)
    assert rec["result"]["proportion"] == 1.0
    assert rec["result"]["count"] == len(rec["rows"])


def test_verify_chowla_empty_range(capsys):
    code, out, _ = run(capsys, "verify-chowla", "--min", "50", "--max", "49", "--threads", "1", "--emit-json")
    assert code == 0 and json.loads(out)["result"]["proportion"] is None


def test_zero_density_table(capsys):
    code, out, _ = run(capsys, "zero-density", "--X", "40", "--threads", "1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["sigma", "count", "bound_exponent"]
    assert all(r[1] == "0" for r in rows[1:])


def test_failed_check_exits_1(capsys):
    assert run(capsys, "selberg-demo", "--tol", "1e-30", "--threads", "1")[0] == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["scan", "--R", "", "--threads", "1"],
    ["scan", "--R", "x,y"],
    ["ks", "--tol", "-1"],
    ["reproduce-bound", "--b", "1.5"],
    ["verify-chowla", "--max", "10", "--budget", "5"],
    ["ks", "--threads", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_nonconvergence_exits_3(capsys, monkeypatch):
    import nonvanishing.theory as theory

    def boom(*a, **k):
        raise ConvergenceError("forced", 0.0, 1.0)

    monkeypatch.setattr(theory, "bound_report", boom)
    assert run(capsys, "reproduce-bound", "--threads", "1")[0] == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nonvanishing", "ks", "--threads", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "0.1827" in r.stdout + r.stderr
