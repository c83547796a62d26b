from __future__ import annotations

import json
import re
import subprocess
import sys

import pytest

from kecert.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_x25_trace(capsys):
    code, out, _ = run(capsys, "analyze", "3", "5", "7", "11", "--trace")
    assert code == 0
    for value in ("25/21", "5/14", "2/3"):
        assert value in out
    assert "verdict no-tiger: certified" in out
    assert "chart estimate at P3 with pair (0,1) in chart 3: 25/21" in out


def test_analyze_x15_zeroed(capsys):
    code, out, _ = run(capsys, "analyze", "1", "3", "5", "7", "--zero-coeff", "0,1,1,1")
    assert code == 0
    assert "verdict KE: inconclusive" in out
    assert "(x0=0) is a tiger" in out


def test_analyze_rejects_triple_gcd(capsys):
    code, _, err = run(capsys, "analyze", "2", "2", "4", "5")
    assert code == 1
    assert "(2, 2, 4)" in err and "gcd" in err


def test_unsorted_input_is_noted(capsys):
    code, out, _ = run(capsys, "analyze", "11", "3", "7", "5")
    assert code == 0
    assert "reordered from (11,3,7,5) to (3,5,7,11)" in out


def test_json_and_text_carry_the_same_rationals(capsys):
    _, text, _ = run(capsys, "analyze", "3", "5", "7", "11", "--trace")
    code, js, _ = run(capsys, "analyze", "3", "5", "7", "11", "--format", "json")
    assert code == 0
    doc = json.loads(js)
    assert doc["schema_version"] == 1
    assert doc["verdict"]["tiger"] == "certified"
    json_values = {t["value"] for t in doc["trace"] if t["value"] is not None}
    text_values = set(re.findall(r": (\S+)$", text, flags=re.M)) & json_values
    assert json_values == text_values
    assert not re.search(r"\d\.\d", js)  # rationals are never decimals


def test_mode_filters_verdicts(capsys):
    _, out, _ = run(capsys, "analyze", "1", "3", "5", "7", "--mode", "ke")
    assert "verdict KE" in out and "verdict no-tiger" not in out
    _, js, _ = run(capsys, "analyze", "1", "3", "5", "7", "--mode", "tiger", "--format", "json")
    v = json.loads(js)["verdict"]
    assert "tiger" in v and "ke" not in v


def test_explicit_coefficients(capsys):
    code, js, _ = run(
        capsys, "analyze", "1", "2", "3", "5", "--format", "json",
        "--coeff", "0,2,2,0=1", "--coeff", "0,1,1,1=2", "--coeff", "0,0,0,2=1",
    )
    assert code == 0
    doc = json.loads(js)
    assert doc["singular"][0]["lct_path"]["lct"] == "7/10"
    assert doc["verdict"]["ke"] == "certified"


def test_non_anticanonical_degree_is_inspection_only(capsys):
    code, out, _ = run(capsys, "analyze", "1", "2", "3", "5", "--degree", "12")
    assert code == 0
    assert "inspection only" in out and "verdict" not in out


def test_monomials(capsys):
    assert run(capsys, "monomials", "3", "5", "7", "11", "--degree", "25", "--support", "1,2,3")[1] == "x1^5, x2^2*x3\n"
    assert run(capsys, "monomials", "1", "1", "1", "1", "--degree", "0")[1] == "1\n"


def test_search_csv(capsys):
    code, out, _ = run(capsys, "search", "--max-weight", "18", "--quasismooth-only", "--format", "csv", "--jobs", "2")
    assert code == 0
    for row in ("3,5,11,18,36,", "3,5,7,14,28,", "3,5,7,11,25,", "2,3,5,9,18,", "1,3,5,7,15,", "1,2,3,5,10,"):
        assert any(line.startswith(row) for line in out.splitlines())


def test_search_to_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, err = run(capsys, "search", "--max-weight", "4", "--out", str(path), "--format", "json", "--jobs", "1")
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["schema_version"] == 1


@pytest.mark.parametrize(
    "argv,code",
    [
        (["analyze", "3", "5", "7", "11"], 0),
        (["analyze", "1", "3", "5", "7", "--zero-coeff", "0,1,1,1"], 0),
        (["analyze", "2", "2", "4", "5"], 1),
        (["analyze", "1", "2", "3"], 1),
        (["analyze", "1", "2", "3", "x"], 1),
        (["analyze", "0", "1", "2", "3"], 1),
        (["analyze", "1", "3", "5", "7", "--zero-coeff", "1,1,1"], 1),
        (["analyze", "1", "3", "5", "7", "--zero-coeff", "1,1,1,0"], 1),
        (["analyze", "1", "3", "5", "7", "--coeff", "0,1,1,1"], 1),
        (["analyze", "1", "3", "5", "7", "--coeff", "0,1,1,1=0"], 1),
        (["analyze", "1", "3", "5", "7", "--mode", "fast"], 1),
        (["search"], 1),
        (["search", "--max-weight", "0"], 1),
        (["search", "--max-weight", "3", "--jobs", "0"], 1),
        (["monomials", "1", "2", "3", "5"], 1),
        (["monomials", "1", "2", "3", "5", "--degree", "-1"], 1),
        (["monomials", "1", "2", "3", "5", "--degree", "4", "--support", "7"], 1),
        (["frobnicate"], 1),
        ([], 1),
    ],
)
def test_exit_code_matrix(capsys, argv, code):
    assert main(argv) == code


def test_consistency_failure_exits_2(capsys, monkeypatch):
    from kecert import cli
    from kecert.certify import ConsistencyError

    def broken(surface):
        raise ConsistencyError("forced")

    monkeypatch.setattr(cli, "certify", broken)
    code, _, err = run(capsys, "analyze", "3", "5", "7", "11")
    assert code == 2 and "forced" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kecert", "monomials", "1", "3", "5", "7", "--degree", "15", "--support", "1,2,3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "x1^5, x1*x2*x3, x2^3\n"
