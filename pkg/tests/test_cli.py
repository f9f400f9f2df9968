import csv
import io
import json
import subprocess
import sys

import pytest

from selfcheck.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coverage_csv_row(capsys):
    code, out, _ = run(capsys, "coverage", "--op", "add", "--bits", "2", "--tech", "tech1",
                       "--mode", "same-unit", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["total"] == "1024"


def test_coverage_json_and_text(capsys):
    code, out, _ = run(capsys, "coverage", "--op", "*", "--bits", "3", "--tech", "both",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["operator"] == "mul"
    code, out, _ = run(capsys, "coverage", "--op", "sub", "--bits", "3", "--tech", "tech2")
    assert code == 0 and "sub" in out and "%" in out


@pytest.mark.parametrize("argv", [
    ["coverage", "--op", "add", "--bits", "40", "--tech", "tech1"],
    ["coverage", "--op", "add", "--bits", "0", "--tech", "tech1"],
    ["coverage", "--op", "mod", "--bits", "4", "--tech", "tech1"],
    ["coverage", "--op", "add", "--bits", "4", "--tech", "tech9"],
    ["coverage", "--op", "div", "--bits", "4", "--tech", "both"],
    ["coverage", "--op", "add", "--bits", "4", "--tech", "tech1", "--sample", "20000"],
    ["coverage", "--op", "add", "--bits", "4", "--tech", "tech1", "--sample", "10", "--seed", "1"],
    ["coverage", "--op", "add", "--bits", "4", "--tech", "tech1", "--seed", "1"],
    ["coverage", "--op", "add", "--bits", "4", "--tech", "tech1", "--threads", "-2"],
    ["nonsense"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_budget_refusal_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("SCK_BUDGET", "1000")
    code, out, err = run(capsys, "coverage", "--op", "add", "--bits", "2", "--tech", "tech1")
    assert code == 3 and not out and "--sample" in err
    code, _, _ = run(capsys, "coverage", "--op", "add", "--bits", "12", "--tech", "tech1",
                     "--sample", "20000", "--seed", "1")
    assert code == 0
    monkeypatch.setenv("SCK_BUDGET", "lots")
    code, _, err = run(capsys, "coverage", "--op", "add", "--bits", "2", "--tech", "tech1")
    assert code == 2 and "SCK_BUDGET" in err


def test_default_budget_refuses_wide_exhaustive(capsys):
    code, _, _ = run(capsys, "coverage", "--op", "add", "--bits", "16", "--tech", "tech1")
    assert code == 3


def test_threads_give_identical_bytes(capsys):
    outs = []
    for t in ("1", "3"):
        code, out, _ = run(capsys, "coverage", "--op", "add", "--bits", "5", "--tech", "both",
                           "--format", "csv", "--threads", t)
        assert code == 0
        outs.append(out)
    for t in ("1", "3"):
        code, out, _ = run(capsys, "coverage", "--op", "add", "--bits", "16", "--tech", "both",
                           "--sample", "100000", "--seed", "7", "--format", "csv", "--threads", t)
        outs.append(out)
    assert outs[0] == outs[1] and outs[2] == outs[3]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.csv"
    code, out, _ = run(capsys, "coverage", "--op", "add", "--bits", "1", "--tech", "tech1",
                       "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("operator,technique")
    code, _, _ = run(capsys, "coverage", "--op", "add", "--bits", "1", "--tech", "tech1",
                     "--output", str(tmp_path / "no" / "such" / "dir.csv"))
    assert code == 2


def test_fir_campaign_csv(capsys):
    code, out, _ = run(capsys, "fir", "--campaign", "--policy", "both", "--bits", "8",
                       "--runs", "5", "--samples", "8", "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["runs"] == str(5 * 32 * 8)
    assert 0.0 <= float(row["end_to_end_detection"]) <= 1.0


def test_fir_campaign_with_input_files(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("1\n2\n3\n")
    b.write_text("4\n5\n6\n")
    code, out, _ = run(capsys, "fir", "--bits", "8", "--input", str(a), "--input", str(b),
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["runs"] == 2 * 32 * 8
    b.write_text("4\n5\n")
    code, _, err = run(capsys, "fir", "--bits", "8", "--input", str(a), "--input", str(b))
    assert code == 2
    # the default 3-tap filter has a coefficient of 70, too wide for 6 bits
    code, _, err = run(capsys, "fir", "--bits", "6", "--input", str(a))
    assert code == 2 and "not representable" in err


def test_fir_bench_shape(capsys):
    code, out, _ = run(capsys, "fir", "--bench", "--length", "64", "--repetitions", "2",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    for key in ("plain_s", "checked_s", "embedded_s", "checked_ratio", "embedded_ratio"):
        assert float(data[key]) > 0


def test_fir_file_errors(capsys, tmp_path):
    code, _, err = run(capsys, "fir", "--taps", str(tmp_path / "missing.txt"))
    assert code == 2 and "missing.txt" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\nthree\n")
    code, _, err = run(capsys, "fir", "--taps", str(bad))
    assert code == 2 and ":3:" in err
    wide = tmp_path / "wide.txt"
    wide.write_text("1000\n")
    code, _, err = run(capsys, "fir", "--taps", str(wide), "--bits", "8")
    assert code == 2


def test_bench_command(capsys):
    code, out, _ = run(capsys, "bench", "--length", "32", "--repetitions", "1",
                       "--campaign-bits", "3", "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["campaign_situations"] == "6144"


def test_table2_text(capsys):
    code, out, _ = run(capsys, "table2")
    assert code == 0
    lines = out.splitlines()
    assert [ln.split()[0] for ln in lines[1:6]] == ["1", "2", "3", "4", "8"]
    assert "95.31%" in out
    assert "7808" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "selfcheck", "coverage", "--op", "add",
                           "--bits", "40", "--tech", "tech1"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "selfcheck", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
