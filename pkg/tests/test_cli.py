"""Exit codes, determinism and report structure of the command line."""

import json
import re
import subprocess
import sys

import pytest

from koszulmf.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    return json.loads(out)


def test_hkr_example(capsys):
    code, out, err = run_cli(["hkr", "--n", "2", "--r", "2", "--t", "-2"], capsys)
    assert code == 0
    doc = report(out)
    assert doc["results"]["dim"] == 1
    assert doc["command"] == "hkr"
    assert "PASS" in err


def test_usage_and_precondition_errors(capsys):
    assert run_cli(["zonotope", "--n", "0"], capsys)[0] == 2
    assert run_cli(["no-such-command"], capsys)[0] == 2
    assert run_cli(["hkr", "--n", "2"], capsys)[0] == 2  # missing required
    assert run_cli(["rnc", "--n", "1", "--pphi", "1,-2,1"], capsys)[0] == 2
    assert run_cli(["minimal-model", "--n", "1", "--a-weights", "1,1,1"],
                   capsys)[0] == 2


def test_report_determinism(capsys):
    argv = ["zonotope", "--n", "2"]
    _, first, _ = run_cli(argv, capsys)
    _, second, _ = run_cli(argv, capsys)
    strip = lambda s: re.sub(r'"wall_time_seconds": [^,\n]+', "", s)
    assert strip(first) == strip(second)
    assert first != ""


def test_zonotope_report(capsys):
    code, out, _ = run_cli(["zonotope", "--n", "2"], capsys)
    assert code == 0
    res = report(out)["results"]
    assert res["cell_counts"] == [14, 24, 12]
    assert res["euler_characteristic"] == 2
    assert res["homology_ranks"] == [1, 0, 1]


def test_mf_check_n1(capsys):
    code, out, _ = run_cli(["mf-check", "--n", "1", "--samples", "20"], capsys)
    assert code == 0
    res = report(out)["results"]
    assert res["delta_squared_is_w"] is True
    assert res["differential_squared_zero"] is True
    assert res["dims_by_subset_size"] == [1, 3, 3, 1]


def test_morse_and_coamoeba_and_pearl(capsys):
    code, out, _ = run_cli(["morse", "--n", "1"], capsys)
    assert code == 0
    res = report(out)["results"]
    assert res["count"] == 6
    assert res["index_histogram"] == [3, 3]

    code, out, _ = run_cli(
        ["coamoeba", "--theta", "3.141592653589793,0,0"], capsys
    )
    assert code == 0
    assert report(out)["results"]["classification"] == "boundary"

    code, out, _ = run_cli(
        ["pearl-degree", "--n", "1", "--k0", "-", "--inputs", "1", "2", "3"],
        capsys,
    )
    assert code == 0
    res = report(out)["results"]
    assert res["degree"] == "1/1"
    assert res["integer"] is True


def test_validate_labels_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(
        {"n": 1, "pearls": [{"flips": [[1], [2], [3]], "degree": 1}]}
    ))
    code, out, _ = run_cli(["validate-labels", "--file", str(good)], capsys)
    assert code == 0
    assert report(out)["results"]["issues"] == []

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(
        {"n": 1, "pearls": [{"flips": [[1], [2], [3]], "degree": -1}]}
    ))
    code, out, _ = run_cli(["validate-labels", "--file", str(bad)], capsys)
    assert code == 1
    assert report(out)["results"]["issues"]


def test_rnc_report(capsys):
    code, out, _ = run_cli(["rnc", "--n", "1", "--pphi", "1,2,-3"], capsys)
    assert code == 0
    res = report(out)["results"]
    assert res["nodes"] == ["3/1", "3/2", "-1/1"]
    assert res["interpolates_coordinate_points"] is True
    assert res["anchor_at_zero"] is True
    assert res["cleared_degrees"] == [1, 1, 1]
    roots = [c["roots"] for c in res["crossings"]]
    assert all(len(r) == 1 for r in roots)
    assert abs(roots[0][0] - 9 / 11) < 1e-9


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "model_n1.json"
    proc = subprocess.run(
        [sys.executable, "-m", "koszulmf.cli", "minimal-model", "--n", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    path.write_text(proc.stdout)
    return path


def test_minimal_model_report(model_file):
    doc = json.loads(model_file.read_text())
    checks = doc["results"]["checks"]
    assert doc["results"]["pass"] is True
    assert checks["stasheff_violations"] == []
    assert checks["supercommutative"] is True
    assert checks["graded"] is True
    assert checks["obstruction_class"] == "-1/1"
    assert checks["obstruction_is_unit"] is True
    assert sorted(checks["permutation_table"]) == [
        [[2, 3, 1], -1, 3],
        [[3, 2, 1], -2, 3],
    ]
    tables = doc["results"]["model"]["tables"]
    assert {k: len(v) for k, v in tables.items()} == {"2": 27, "3": 68}


def test_opposite_is_involutive_through_files(model_file, tmp_path, capsys):
    code, out, _ = run_cli(["opposite", "--model", str(model_file)], capsys)
    assert code == 0
    once = tmp_path / "op.json"
    once.write_text(out)
    code, out, _ = run_cli(["opposite", "--model", str(once)], capsys)
    assert code == 0
    original = json.loads(model_file.read_text())["results"]["model"]
    assert report(out)["results"]["model"] == original


def test_smash_dimensions(model_file, capsys):
    code, out, _ = run_cli(
        ["smash", "--model", str(model_file), "--group", "3:1;1;1"], capsys
    )
    assert code == 0
    res = report(out)["results"]
    assert res["dimension"] == 24
    assert {k: len(v) for k, v in res["tables"].items()} == {
        "2": 27 * 9,
        "3": 68 * 27,
    }

    code, _, _ = run_cli(
        ["smash", "--model", str(model_file), "--group", "3:1;1;2"], capsys
    )
    assert code == 2  # rho rows must sum to zero mod the factors


def test_console_script_entry():
    proc = subprocess.run(
        ["koszulmf", "hkr", "--n", "1", "--r", "2", "--t", "-1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["dim"] == 1
