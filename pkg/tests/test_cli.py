import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F
from types import SimpleNamespace

import pytest

from tfham import report
from tfham.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def usage_code(*argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    return info.value.code


# solve ----------------------------------------------------------------------

def test_solve_table_row(capsys):
    # first published slope row; regenerated at h=-4/5 (see README)
    code, out, _ = call(capsys, "solve", "--alpha", "3/4", "--beta", "1", "--gamma", "1",
                        "--h", "-4/5", "--order", "10", "--precision", "256")
    assert code == EXIT_OK
    summary = json.loads(out)
    assert abs(float(summary["slope"]) - -1.54628) <= 5e-5
    assert summary["config"]["h"] == "-4/5"
    assert len(summary["slope_per_order"]) == 11
    assert "seconds_per_order" not in summary


def test_solve_unit_order_zero(capsys):
    code, out, _ = call(capsys, "solve", "--alpha", "1", "--beta", "1", "--gamma", "1",
                        "--h", "-1/2", "--order", "0", "--mode", "exact")
    assert code == EXIT_OK
    assert json.loads(out)["slope"] == "-1"


def test_solve_timings_opt_in(capsys):
    _, out, _ = call(capsys, "solve", "--order", "2", "--timings", "--precision", "128")
    assert len(json.loads(out)["seconds_per_order"]) == 3


def test_solve_solution_csv(capsys):
    code, out, _ = call(capsys, "solve", "--order", "20", "--precision", "128",
                        "--eval-grid", "0,1,2", "--format", "csv")
    assert code == EXIT_OK
    data = rows(out)
    assert list(data[0]) == ["x", "u_ham", "u_ref", "abs_diff"]
    assert [r["x"] for r in data] == ["0", "1", "2"]
    assert float(data[0]["u_ham"]) == 1.0
    assert float(data[1]["abs_diff"]) < 1e-3


@pytest.mark.parametrize(
    "argv",
    [
        ("solve", "--gamma", "0", "--order", "1"),
        ("solve", "--h", "1/2", "--order", "1"),
        ("solve", "--h", "abc", "--order", "1"),
        ("solve", "--order", "-1"),
        ("solve", "--gamma", "1/2", "--mode", "exact", "--order", "1"),
        ("hcurve", "--h-min", "-0.5", "--h-max", "-0.8"),
        ("reproduce", "table3"),
        ("reproduce", "table1", "--mode", "exact"),
        ("frobnicate",),
    ],
)
def test_usage_errors(argv):
    assert usage_code(*argv) == EXIT_USAGE


def test_engine_failure_exit_code(capsys):
    code, _, err = call(capsys, "solve", "--alpha", "5", "--operator", "printed",
                        "--mode", "exact", "--order", "2")
    assert code == EXIT_FAILURE
    assert "order 1" in err and "resonates" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tfham", "solve", "--gamma", "0", "--order", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
    proc = subprocess.run([sys.executable, "-m", "tfham", "solve", "--order", "0", "--mode", "exact"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["slope"] == "-4/3"


# hcurve ---------------------------------------------------------------------

def test_hcurve_schema_and_single_sample(capsys):
    code, out, _ = call(capsys, "hcurve", "--order", "6", "--h-min", "-4/5", "--h-max", "-1/2",
                        "--samples", "1", "--precision", "128")
    assert code == EXIT_OK
    data = rows(out)
    assert list(data[0]) == ["h", "slope", "curvature"]
    assert len(data) == 1
    _, solo, _ = call(capsys, "solve", "--order", "6", "--h", "-4/5", "--precision", "128")
    assert F(data[0]["h"]) == F(-4, 5)
    assert float(data[0]["slope"]) == pytest.approx(float(json.loads(solo)["slope"]), rel=1e-15)


def test_hcurve_parallel_matches_serial(capsys):
    argv = ["hcurve", "--order", "5", "--h-min", "-1", "--h-max", "-1/4", "--samples", "4",
            "--precision", "128"]
    _, serial, _ = call(capsys, *argv)
    _, parallel, _ = call(capsys, *argv, "--jobs", "2")
    assert serial == parallel
    hs = [F(r["h"]) for r in rows(serial)]
    assert hs == [F(-1), F(-3, 4), F(-1, 2), F(-1, 4)]


# pade -----------------------------------------------------------------------

def test_pade_table_row(capsys):
    code, out, _ = call(capsys, "pade", "--m", "10", "--alpha", "3/4", "--h", "-3/4", "--precision", "256")
    assert code == EXIT_OK
    data = rows(out)
    assert list(data[0]) == ["m", "value", "expected", "err_pct", "method", "verdict"]
    assert [int(r["m"]) for r in data] == list(range(1, 11))
    last = data[-1]
    assert abs(float(last["value"]) - -1.58030) <= 2e-4
    assert abs(float(last["err_pct"]) - 0.489) <= 0.02
    assert last["verdict"] == report.MATCH


def test_pade_m0(capsys):
    code, out, _ = call(capsys, "pade", "--m", "0", "--mode", "exact")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["value"] == "-4/3"


def test_pade_degenerate_row_reported():
    seq = SimpleNamespace(slope_per_order=[F(1), F(1), F(1)])
    out = report.pade_rows(seq, 1, reference=None)
    assert out[1]["method"] == "degenerate"
    assert out[0]["value"] == "1"


# reference ------------------------------------------------------------------

def test_reference_default_and_bracket(capsys):
    code, out, _ = call(capsys, "reference")
    assert code == EXIT_OK
    slope = float(json.loads(out)["slope"])
    assert abs(slope - -1.58807) <= 5e-5
    code, out, _ = call(capsys, "reference", "--bracket", "-1.6", "-1.5")
    assert abs(float(json.loads(out)["slope"]) - slope) <= 1e-9


def test_reference_bracket_error(capsys):
    code, _, err = call(capsys, "reference", "--bracket", "-1.4", "-1.3")
    assert code == EXIT_FAILURE
    assert "BracketError" in err


def test_reference_csv(capsys):
    _, out, _ = call(capsys, "reference", "--format", "csv")
    data = rows(out)
    assert list(data[0]) == ["x", "u"]
    assert float(data[0]["u"]) == 1.0


# reproduce ------------------------------------------------------------------

def test_reproduce_table1_desk(capsys):
    code, out, err = call(capsys, "reproduce", "table1", "--max-order", "20", "--precision", "256")
    assert code == EXIT_OK
    data = rows(out)
    assert list(data[0])[:8] == ["N", "slope", "expected", "err_pct", "expected_err", "curvature",
                                 "expected_curv", "verdict"]
    assert [r["N"] for r in data] == ["10", "20"]
    assert all(r["verdict"] == report.MATCH for r in data)
    assert "Informational" in err  # unit-basis column


def test_reproduce_table2_desk(capsys):
    code, out, _ = call(capsys, "reproduce", "table2", "--max-m", "10", "--precision", "256")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["m"] == "10" and row["verdict"] == report.MATCH
    assert abs(float(row["value"]) - -1.58030) <= 2e-4


def test_reproduce_json(capsys):
    code, out, _ = call(capsys, "reproduce", "table1", "--max-order", "10", "--precision", "128",
                        "--format", "json")
    doc = json.loads(out)
    assert doc["ok"] is True and code == EXIT_OK
    assert {c["verdict"] for c in doc["checks"]} <= {report.MATCH, report.INFO}


# determinism / output -------------------------------------------------------

def test_byte_identical_output(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["solve", "--order", "8", "--precision", "192", "--out", str(p)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert paths[0].read_bytes() == paths[1].read_bytes()
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        main(["reproduce", "table1", "--max-order", "10", "--precision", "128", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
