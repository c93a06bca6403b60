import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from pfq.cli import (CSV_COLUMNS, EXIT_FAIL, EXIT_OK, EXIT_USAGE,
                     census_plan, main)

from conftest import tower

F9 = ["--p", "3", "--k", "1", "--ell", "1"]
F729 = ["--p", "3", "--k", "3", "--ell", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", *F729, "--c", "0,0,1,0")
    assert code == EXIT_OK
    js = json.loads(out)
    assert js["class"] == "F1" and js["planar"] is True
    assert js["witness"]["canonical"] == ["000", "000", "100", "000"]


def test_classify_constant_g(capsys):
    code, out, _ = run(capsys, "classify", *F9, "--c", "1,0,0,1")
    js = json.loads(out)
    assert code == EXIT_OK and js["coarse"] == "ConstantG" and js["planar"] is False


def test_usage_errors(capsys):
    assert run(capsys, "classify", *F9, "--c", "0,0,0,0")[0] == EXIT_USAGE
    assert run(capsys, "classify", *F9, "--c", "0,1")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--p", "3", "--c", "0,0,0,1")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--p", "4", "--k", "1", "--ell", "1", "--c", "0,0,0,1")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--field", "{not json", "--c", "1,0,0,0")[0] == EXIT_USAGE
    assert run(capsys, "nosuchcommand")[0] == EXIT_USAGE


def test_field_json_flag(capsys):
    field = json.dumps(tower(3, 1, 1).to_json())
    code, out, _ = run(capsys, "classify", "--field", field, "--c", "0,0,0,1")
    assert code == EXIT_OK and json.loads(out)["class"] == "F0"


def test_planar_both(capsys):
    code, out, _ = run(capsys, "planar", *F9, "--c", "0,0,0,1", "--both")
    js = json.loads(out)
    assert code == EXIT_OK and js["agree"] and js["brute"] is False
    assert set(js["brute_witness"]) == {"a", "b", "x1", "x2"}
    code, out, _ = run(capsys, "planar", *F9, "--c", "0,0,0,1", "--oracle-only")
    assert "classifier" not in json.loads(out)


def test_invariants_and_geometry(capsys):
    code, out, _ = run(capsys, "invariants", *F9, "--c", "1,2,0+u*1,1")
    js = json.loads(out)
    assert code == EXIT_OK and all(js["identities"].values())
    code, out, _ = run(capsys, "geometry", *F9, "--c", "0,0,0,1")
    assert code == EXIT_OK and json.loads(out)["ok"]


def test_family(capsys):
    code, out, _ = run(capsys, "family", *F9, "--tag", "P2", "--epsilon", "2", "--planar")
    js = json.loads(out)
    assert code == EXIT_OK and js["brute"] is True and js["classifier"] is True
    code, out, _ = run(capsys, "family", *F9, "--tag", "P3", "--epsilon", "2")
    assert code == EXIT_USAGE


def _census(capsys, tmp_path, name, *extra):
    path = tmp_path / name
    code, out, _ = run(capsys, "census", *F9, "--samples", "300", "--seed", "11",
                       "--out", str(path), *extra)
    return code, path.read_bytes(), json.loads(out)


def test_census_deterministic(capsys, tmp_path):
    c1, a, s1 = _census(capsys, tmp_path, "a.csv")
    c2, b, s2 = _census(capsys, tmp_path, "b.csv")
    c3, c, _ = _census(capsys, tmp_path, "c.csv", "--workers", "2")
    assert c1 == c2 == c3 == EXIT_OK
    assert a == b == c
    assert s1 == s2 and s1["disagreements"] == 0 and s1["rows"] == 300
    rows = list(csv.DictReader(io.StringIO(a.decode())))
    assert list(rows[0]) == list(CSV_COLUMNS)
    # every row the classifier calls planar was brute-forced
    assert all(r["verdict_brute"] for r in rows if r["verdict_class"] == "planar")
    assert all(r["agree"] in ("", "true") for r in rows)


def test_census_seed_changes_sample(capsys, tmp_path):
    _, a, _ = _census(capsys, tmp_path, "a.csv")
    path = tmp_path / "d.csv"
    run(capsys, "census", *F9, "--samples", "300", "--seed", "12", "--out", str(path))
    assert path.read_bytes() != a


def test_census_summary_file(capsys, tmp_path):
    summ = tmp_path / "s.json"
    code, out, err = run(capsys, "census", *F9, "--samples", "50", "--summary", str(summ))
    assert code == EXIT_OK
    assert out.startswith(",".join(CSV_COLUMNS))
    assert json.loads(summ.read_text())["rows"] == 50
    assert json.loads(err)["rows"] == 50


def test_census_budget(capsys):
    code, _, err = run(capsys, "census", *F729, "--exhaustive")
    assert code == EXIT_USAGE and "budget" in err
    assert run(capsys, "census", *F9, "--samples", "20", "--budget", "10")[0] == EXIT_USAGE


def test_census_plan_cross_check_fraction():
    t = tower(3, 1, 1)
    keys, flags = census_plan(t, samples=1000, cross_check=0.05, seed=3)
    assert len(keys) == 1000 and sum(flags) == 50
    assert keys == sorted(keys)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--fields", "3,1,1", "5,1,1", "--samples", "20")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines and all(l.startswith("PASS") for l in lines)


def test_verify_fault_injection(capsys):
    code, out, _ = run(capsys, "verify", "--fields", "3,1,1", "--samples", "30",
                       "--inject-fault", "E4-sign")
    assert code == EXIT_FAIL
    assert "FAIL (3,1,1) E4" in out
    assert "PASS (3,1,1) E1" in out


def test_charsum(capsys):
    code, out, _ = run(capsys, "charsum", "appendix-a", *F729, "--epsilon", "1")
    js = json.loads(out)
    assert code == EXIT_OK and js["sum"] == 24 and js["positive"]
    assert js["bound"] == pytest.approx(13.608, abs=1e-3)
    code, out, _ = run(capsys, "charsum", "appendix-b", *F729, "--epsilon", "1+u*1")
    js = json.loads(out)
    assert code == EXIT_OK and js["positive"] and js["bound_holds"]
    code, _, _ = run(capsys, "charsum", "appendix-a", "--p", "3", "--k", "2", "--ell", "4", "--epsilon", "1")
    assert code == EXIT_USAGE


@pytest.mark.skipif(shutil.which("pfq") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["pfq", "classify", *F9, "--c", "0,0,0,1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["class"] == "F0"


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "pfq.cli", "planar", *F9, "--c", "0,0,1,0"],
                         capture_output=True, text=True)
    assert res.returncode == 0
