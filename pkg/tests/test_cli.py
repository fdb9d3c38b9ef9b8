import csv
import json
import subprocess
import sys

import pytest

from modineq.cli import RunManifest, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_example(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = call(
        capsys, "verify", "--builder", "ssa", "--dims", "2,2,2", "--trials", "200", "--seed", "7", "--tol", "1e-9", "--out", str(out)
    )
    assert code == 0
    data = json.loads(out.read_text())
    (rep,) = data["reports"]
    assert rep["trials"] == 200 and rep["pass_count"] == 200
    assert all(r["verdict"] for r in rep["records"])
    assert data["exit_status"] == 0
    assert data["config"]["seed"] == 7
    assert "PASS" in stdout


def test_wyd_zero_is_usage_error(tmp_path, capsys):
    code, _, err = call(capsys, "verify", "--builder", "wyd:0", "--out", str(tmp_path / "x.json"))
    assert code == 2
    assert "t must avoid {0,1}" in err
    assert not (tmp_path / "x.json").exists()


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["verify", "--builder", "nope"], "ssa_kim"),
        (["convexity", "--g", "nope"], "neg_log"),
        (["counterexample", "--builder", "ssa"], "h_probe"),
        (["verify", "--builder", "wyd:5"], "[-1, 2]"),
    ],
)
def test_invalid_ids_list_valid_ones(argv, needle, capsys, tmp_path):
    code, _, err = call(capsys, *argv, "--out", str(tmp_path / "x.json"))
    assert code == 2
    assert needle in err


@pytest.mark.parametrize("dims", ["2,2", "2,0,2", "a,b,c"])
def test_invalid_dims(dims, capsys):
    code, _, err = call(capsys, "verify", "--dims", dims)
    assert code == 2
    assert "dims" in err


def test_missing_subcommand(capsys):
    assert call(capsys)[0] == 2


def test_list(capsys):
    code, out, _ = call(capsys, "list")
    assert code == 0
    for gid in ("neg_log", "x_log_x", "wyd:<t>", "square_diff", "inv_sqrt", "bures"):
        assert gid in out
    for bid in ("ssa", "ssa_kim", "ssa_rev", "subadd", "mpt", "cond_info_bound", "cs", "lr_cs", "xpq", "xhalf", "general:<g-id>"):
        assert bid in out


def test_comma_and_repeated_builders(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = call(capsys, "verify", "--builder", "ssa,cs", "--builder", "wyd:-0.5", "--trials", "3", "--out", str(out))
    assert code == 0
    names = [r["name"] for r in json.loads(out.read_text())["reports"]]
    assert names == ["ssa@2,2,2", "cs@2,2,2", "wyd:-0.5@2,2,2"]


def test_failure_exit_code(tmp_path, capsys):
    # seed 42 with a budget of 3 has no h witness
    code, stdout, _ = call(
        capsys, "counterexample", "--builder", "h_probe", "--trials", "3", "--out", str(tmp_path / "c.json")
    )
    assert code == 1
    assert "FAIL" in stdout
    assert json.loads((tmp_path / "c.json").read_text())["exit_status"] == 1


def test_manifest_roundtrip(tmp_path, capsys):
    out = tmp_path / "r.json"
    call(capsys, "counterexample", "--out", str(out))
    text = out.read_text()
    m = RunManifest.from_json(text)
    assert m.to_json() == text
    assert m.command == "counterexample" and len(m.reports) == 3
    assert all(r.passed for r in m.reports)


def test_csv_output(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = call(capsys, "verify", "--builder", "ssa", "--trials", "4", "--format", "both", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "r.csv").open()))
    assert [r["seed"] for r in rows] == ["42", "43", "44", "45"]
    first = json.loads(out.read_text())["reports"][0]["records"][0]
    assert float(rows[0]["min_eig"]) == first["min_eig"]
    assert float(rows[0]["herm_defect"]) == first["herm_defect"]


def test_csv_only(tmp_path, capsys):
    out = tmp_path / "r.json"
    call(capsys, "verify", "--trials", "2", "--format", "csv", "--out", str(out))
    assert (tmp_path / "r.csv").exists() and not out.exists()


def test_normalize_flag_recorded(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = call(capsys, "verify", "--builder", "mpt,xhalf", "--normalize", "off", "--trials", "5", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["config"]["normalize"] is False


def test_convexity_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = call(capsys, "convexity", "--g", "bures,sym:neg_log", "--trials", "5", "--out", str(out))
    assert code == 0
    names = [r["name"] for r in json.loads(out.read_text())["reports"]]
    assert names[0].startswith("convexity:bures") and names[1].startswith("monotonicity:bures")


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "modineq", "verify", "--builder", "wyd:1", "--out", str(tmp_path / "x.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "t must avoid {0,1}" in proc.stderr
