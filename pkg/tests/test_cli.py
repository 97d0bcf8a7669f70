import json
import os

import numpy as np
import pytest

from treeprofile.cli import run


@pytest.fixture()
def ws_file(tmp_path):
    path = tmp_path / "geometric.json"
    path.write_text(json.dumps({"kind": "geometric", "params": {"q": 0.5},
                                "coeffs": []}))
    return str(path)


@pytest.fixture()
def path4_file(tmp_path):
    path = tmp_path / "path4.csv"
    path.write_text("1,2\n2,3\n3,4\n")
    return str(path)


def test_sample_single_vertex(ws_file, capsys):
    assert run(["sample", "--weights", ws_file, "--n", "1", "--reps", "1"]) == 0
    assert capsys.readouterr().out == "()\n"


def test_sample_deterministic(ws_file, capsys):
    run(["sample", "--weights", ws_file, "--n", "20", "--reps", "2",
         "--seed", "3"])
    first = capsys.readouterr().out
    run(["sample", "--weights", ws_file, "--n", "20", "--reps", "2",
         "--seed", "3"])
    assert capsys.readouterr().out == first
    run(["sample", "--weights", ws_file, "--n", "20", "--reps", "2",
         "--seed", "4"])
    assert capsys.readouterr().out != first


def test_sample_env_seed(ws_file, capsys, monkeypatch):
    monkeypatch.setenv("TREEPROFILE_SEED", "99")
    run(["sample", "--weights", ws_file, "--n", "20", "--reps", "1"])
    with_env = capsys.readouterr().out
    monkeypatch.delenv("TREEPROFILE_SEED")
    run(["sample", "--weights", ws_file, "--n", "20", "--reps", "1",
         "--seed", "99"])
    assert capsys.readouterr().out == with_env


def test_sample_batch_manifest(ws_file, tmp_path, capsys):
    out = str(tmp_path / "batch")
    assert run(["sample", "--weights", ws_file, "--n", "10", "--reps", "4",
                "--seed", "1", "--out", out]) == 0
    manifest = json.loads(open(os.path.join(out, "manifest.json")).read())
    assert manifest["n"] == 10 and manifest["count"] == 4
    assert manifest["seed"] == 1
    assert manifest["weights"]["kind"] == "geometric"
    lines = open(os.path.join(out, "trees.txt")).read().strip().splitlines()
    assert len(lines) == 4
    assert all(line.count("(") == 10 for line in lines)


def test_dist_profile_and_wiener(path4_file, capsys):
    assert run(["dist-profile", "--tree", path4_file]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "i,Lambda"
    assert [row.split(",") for row in out[1:]] == [
        ["0", "4"], ["1", "6"], ["2", "4"], ["3", "2"]]
    assert run(["wiener", "--tree", path4_file]) == 0
    assert capsys.readouterr().out.strip() == "10"


def test_profile_parenthesis_input(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("(()()())")
    run(["profile", "--tree", str(f)])
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ["i,L", "0,1", "1,3"]


def test_exact_command(ws_file, capsys):
    assert run(["exact", "--weights", ws_file, "--n", "3"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "n,k,EL,ELambda"
    vals = [r.split(",") for r in rows[1:]]
    assert float(vals[1][3]) == pytest.approx(4.0)
    assert float(vals[2][3]) == pytest.approx(2.0)


def test_fourier_exact_command(ws_file, capsys):
    assert run(["fourier-exact", "--weights", ws_file, "--n", "32",
                "--xi", "0.0,1.0"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "n,xi,EL2hat,ELambda2hat"
    first = rows[1].split(",")
    assert float(first[2]) == pytest.approx(32.0**2, rel=1e-8)
    assert float(first[3]) == pytest.approx(32.0**4, rel=1e-8)


def test_enumerate_command(ws_file, capsys):
    assert run(["enumerate", "--weights", ws_file, "--n", "3"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert len(rows) == 3  # header + two shapes
    probs = [float(r.split(",")[-1]) for r in rows[1:]]
    assert probs == pytest.approx([0.5, 0.5])


def test_usage_and_feasibility_exit_codes(ws_file, tmp_path, capsys):
    assert run(["sample", "--weights", ws_file]) == 1          # missing --n
    assert run(["nonsense"]) == 1
    span2 = tmp_path / "span2.json"
    span2.write_text(json.dumps({"kind": "table", "params": {},
                                 "coeffs": [0.5, 0.0, 0.5]}))
    assert run(["sample", "--weights", str(span2), "--n", "4"]) == 2
    err = capsys.readouterr().err
    assert "n=4" in err and "mod 2" in err
    assert run(["experiment", "not-an-experiment"]) == 1


def test_experiment_writes_manifest_before_results(ws_file, tmp_path, capsys):
    out = str(tmp_path / "exp")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ns": [50, 100], "reps": [200, 200]}))
    assert run(["experiment", "width", "--config", str(cfg), "--seed", "5",
                "--out", out]) == 0
    files = set(os.listdir(out))
    assert {"manifest.json", "results.csv", "summary.json"} <= files
    manifest = json.loads(open(os.path.join(out, "manifest.json")).read())
    assert manifest["experiment"] == "width" and manifest["seed"] == 5
    assert manifest["config"]["ns"] == [50, 100]


def test_experiment_byte_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ns": [50], "reps": [300]}))
    outs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        run(["experiment", "width", "--config", str(cfg), "--seed", "7",
             "--out", out])
        outs.append(open(os.path.join(out, "results.csv"), "rb").read())
    assert outs[0] == outs[1]


def test_bench_command(ws_file, capsys):
    assert run(["bench", "--sizes", "256,512", "--seed", "1",
                "--weights", ws_file]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "n,algorithm,wall_ms,checksum"
    by_n = {}
    for r in rows[1:]:
        n, algo, ms, chk = r.split(",")
        by_n.setdefault(n, set()).add(chk)
    for n, chks in by_n.items():
        assert len(chks) == 1  # fast and naive agree on the checksum
