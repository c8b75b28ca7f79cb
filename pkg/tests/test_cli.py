import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from homportrait.cli import main


def run(*args):
    return subprocess.run([sys.executable, "-m", "homportrait", *args], capture_output=True, text=True)


def test_classify_saddle(capsys):
    assert main(["classify", "--degree", "1", "--coeffs", "1,0,0,-1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "L1 (i=-1, l=2)"
    assert "origin:" in out


def test_classify_c9(capsys):
    assert main(["classify", "--degree", "3", "--coeffs", "1,0,0,-1,1,1,0,0"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "C9 (i=1, l=0)"


def test_classify_degenerate_exit_3(capsys):
    assert main(["classify", "--degree", "2", "--coeffs", "1,0,0,0,0,1"]) == 3
    assert "λμ=0" in capsys.readouterr().out


def test_classify_json(capsys):
    assert main(["classify", "--degree", "2", "--coeffs", "1,0.1,-1,0.1,2,0", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["label"], doc["index"], doc["lines"], doc["attractor"]) == ("Q5", 2, 1, None)


@pytest.mark.parametrize("coeffs", ["1,0,0", "1,0,zero,1", ""])
def test_parse_errors_exit_2(coeffs, capsys):
    assert main(["classify", "--degree", "1", "--coeffs", coeffs]) == 2


def test_usage_error_exit_2():
    assert run("classify", "--degree", "1").returncode == 2
    assert run("estimate", "--degree", "2", "--samples", "1.5").returncode == 2


def test_lambda(capsys):
    assert main(["lambda", "--n", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1.4142135624"
    main(["lambda", "--n", "2"])
    assert float(capsys.readouterr().out) == pytest.approx(1.64343, abs=1e-5)
    main(["lambda", "--n", "10", "--format", "json"])
    assert json.loads(capsys.readouterr().out)["lambda"] == pytest.approx(2.43552, abs=1e-5)


def test_estimate_byte_identical_and_csv(tmp_path, capsys):
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "t.csv"
    args = ["estimate", "--degree", "2", "--samples", "2e4", "--seed", "42", "--partitions", "2"]
    assert main(args + ["--out", str(a), "--csv", str(c)]) == 0
    printed = capsys.readouterr().out
    assert "z " in printed  # relation z-scores go to stdout
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert c.read_text().startswith("label,count,frequency,std_error\nQ1,")


def test_partitions_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HOMPORTRAIT_PARTITIONS", "3")
    out = tmp_path / "r.json"
    assert main(["estimate", "--degree", "1", "--samples", "3000", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["partitions"] == 3
    monkeypatch.setenv("HOMPORTRAIT_PARTITIONS", "x")
    assert main(["estimate", "--degree", "1", "--samples", "3000", "--out", str(out)]) == 2


def test_selfcheck(capsys):
    assert main(["selfcheck", "--degree", "2", "--samples", "2000"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 4


def test_svg_subcommand(tmp_path):
    out = tmp_path / "saddle.svg"
    assert main(["svg", "--degree", "1", "--coeffs", "1,0,0,-1", "--out", str(out)]) == 0
    ET.parse(out)


def test_console_script_module_entry():
    r = run("classify", "--degree", "1", "--coeffs", "1,0,0,2")
    assert r.returncode == 0 and r.stdout.startswith("L2 (i=1, l=2)")
