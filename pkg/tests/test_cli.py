from __future__ import annotations

import io
import json

import numpy as np
import pytest

from extendkit.cli import main
from extendkit.io import InputError, read_queries, read_set


def _write(path, text):
    path.write_text(text)
    return path


@pytest.fixture
def line_files(tmp_path):
    rows = "".join(f"{float(a)!r},{float(a)!r}\n" for a in np.linspace(-1, 0, 1001))
    s = _write(tmp_path / "A.csv", "x1,value\n" + rows)
    q = _write(tmp_path / "Q.csv", "x1\n0.5\n1\n2\n")
    return s, q


def _values(path):
    lines = path.read_text().splitlines()
    return lines[0], [float(l.split(",")[-1]) for l in lines[1:]]


def test_extend_hausdorff_on_interval(line_files, tmp_path):
    s, q = line_files
    out = tmp_path / "out.csv"
    assert main(["extend", "--operator", "hausdorff", "--set", str(s), "--queries", str(q),
                 "--out", str(out)]) == 0
    header, vals = _values(out)
    assert header == "x1,value"
    np.testing.assert_allclose(vals, [0.0, 0.0, -0.5], atol=1e-9)


def test_extend_bohr_pruned(tmp_path):
    s = _write(tmp_path / "B.csv", "x1,value\n0,0\n1,1\n")
    q = _write(tmp_path / "Q.csv", "x1\n0.1\n2\n")
    out = tmp_path / "o.csv"
    assert main(["extend", "--operator", "bohr", "--set", str(s), "--queries", str(q),
                 "--strategy", "pruned", "--out", str(out)]) == 0
    assert _values(out)[1] == [0.0, 1.0]


def test_extend_is_byte_identical(tmp_path, line_files, monkeypatch):
    s, q = line_files
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("EXTENDKIT_THREADS", threads)
        out = tmp_path / f"o{threads}.csv"
        main(["extend", "--operator", "theta", "--extender", "tietze", "--set", str(s),
              "--queries", str(q), "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("args", [
    ["--operator", "omega"],
    ["--operator", "theta", "--extender", "dieudonne"],
    ["--operator", "mho", "--extender", "riesz"],
    ["--operator", "bohr", "--extender", "riesz"],
    ["--operator", "hausdorff", "--kappa", "1"],
])
def test_extend_bad_combinations(args, line_files, capsys):
    s, q = line_files
    assert main(["extend", *args, "--set", str(s), "--queries", str(q)]) == 2
    assert "error" in capsys.readouterr().err


def test_extend_negative_values(line_files, capsys):
    s, q = line_files
    assert main(["extend", "--operator", "omega", "--extender", "riesz", "--set", str(s),
                 "--queries", str(q)]) == 2
    assert "not an extension" in capsys.readouterr().err


def test_malformed_csv_reports_line(tmp_path, capsys):
    s = _write(tmp_path / "A.csv", "x1,value\n0,1\n0.5,oops\n")
    q = _write(tmp_path / "Q.csv", "x1\n1\n")
    assert main(["extend", "--operator", "hausdorff", "--set", str(s),
                 "--queries", str(q)]) == 2
    assert "A.csv:3" in capsys.readouterr().err


def test_dimension_mismatch(tmp_path):
    s = _write(tmp_path / "A.csv", "x1,x2,value\n0,0,1\n1,1,2\n")
    q = _write(tmp_path / "Q.csv", "x1\n1\n")
    with pytest.raises(InputError, match="dimension mismatch"):
        read_queries(q, read_set(s))


def test_bad_header(tmp_path):
    s = _write(tmp_path / "A.csv", "x,value\n0,1\n")
    with pytest.raises(InputError, match=":1:"):
        read_set(s)


def test_matrix_kind(tmp_path):
    doc = {"n": 3, "matrix": [0, 1, 2, 1, 0, 1, 2, 1, 0], "values": [0.0, None, 1.0]}
    s = _write(tmp_path / "M.json", json.dumps(doc))
    q = _write(tmp_path / "Q.csv", "index\n1\n2\n")
    out = tmp_path / "o.csv"
    assert main(["extend", "--operator", "bohr", "--set", str(s), "--queries", str(q),
                 "--out", str(out)]) == 0
    assert out.read_text() == "index,value\n1,1.0\n2,1.0\n"


def test_matrix_not_a_metric(tmp_path):
    doc = {"n": 3, "matrix": [0, 1, 5, 1, 0, 1, 5, 1, 0], "values": [0.0, 1.0, 2.0]}
    s = _write(tmp_path / "M.json", json.dumps(doc))
    with pytest.raises(InputError, match="triangle"):
        read_set(s)


def test_validate_extender_exit_codes(capsys):
    assert main(["validate-extender", "riesz", "--tau", "0.01", "--grid", "64"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
    assert main(["validate-extender", "tietze", "--tau", "0.01", "--grid", "64"]) == 0
    capsys.readouterr()
    assert main(["validate-extender", "nope"]) == 2


def test_suite_theta_counterexample(capsys, tmp_path):
    assert main(["suite", "--only", "isometry", "--op", "theta", "--out", str(tmp_path)]) == 0
    assert "paper counterexample" in capsys.readouterr().out
    data = json.loads((tmp_path / "reports.json").read_text())
    assert data[0]["status"] == "expected-fail-reproduced"


def test_suite_remarks(capsys):
    assert main(["suite", "--only", "remarks"]) == 0
    assert capsys.readouterr().out.count("EXPECTED-FAIL-REPRODUCED") == 4


def test_suite_usage_errors(capsys):
    assert main(["suite", "--only", "isometry", "--op", "pasch"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["suite", "--only", "nothing"])
    assert exc.value.code == 2
