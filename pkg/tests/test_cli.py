import json
import os
import subprocess
import sys

import networkx as nx
import pytest

from treecover import Graph, _accel, io
from treecover.cli import main

from conftest import to_nx


def run_cli(*argv):
    return main([str(a) for a in argv])


def load(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture
def path200(tmp_path):
    p = tmp_path / "g.json"
    assert run_cli("gen", "path", "--n", 200, "-o", p) == 0
    return p


def test_gen_path(tmp_path):
    p = tmp_path / "p.json"
    assert run_cli("gen", "path", "--n", 10, "-o", p, "--dot", tmp_path / "p.dot") == 0
    g = Graph.from_json(load(p))
    assert g.n == 10 and len(g.edges) == 9
    assert (tmp_path / "p.dot").read_text().startswith("graph")


def test_gen_tree_is_bounded_tree(tmp_path):
    p = tmp_path / "t.json"
    assert run_cli("gen", "tree", "--n", 100, "--max-degree", 3, "--seed", 1, "-o", p) == 0
    g = Graph.from_json(load(p))
    assert nx.is_tree(to_nx(g)) and g.max_degree <= 3


def test_gen_schreier_cycle(tmp_path):
    a = tmp_path / "z8.json"
    a.write_text(json.dumps({"points": 8, "generators": [[(x + 1) % 8 for x in range(8)]]}))
    p = tmp_path / "c.json"
    assert run_cli("gen", "schreier", "--action", a, "-o", p) == 0
    h = to_nx(Graph.from_json(load(p)))
    assert nx.is_isomorphic(h, nx.cycle_graph(8))


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run_cli("gen", "tree", "--n", 300, "--max-degree", 4, "--seed", 9, "-o", p)
    assert a.read_bytes() == b.read_bytes()


def test_lambda_uniform_ball(tmp_path, path200, capsys):
    out = tmp_path / "lam.json"
    assert run_cli("lambda", "uniform-ball", "--graph", path200, "--n", 3, "-o", out,
                   "--defect", 2) == 0
    data = load(out)
    assert data["0"] == {str(i): "1/4" for i in range(4)}


def test_run_success_writes_all_artifacts(tmp_path, path200):
    out = tmp_path / "run"
    assert run_cli("run", "--graph", path200, "--r", 2, "--uniform-ball", 600, "--out", out) == 0
    for name in ("theta.json", "partition.json", "partition.dot", "deletion.json",
                 "witness.json", "report.json"):
        assert (out / name).exists(), name
    rep = load(out / "report.json")
    assert rep["ok"] and rep["cover"]["observed_max_classes_met"] <= 4
    assert run_cli("report", out) == 0


def test_run_outputs_are_byte_identical(tmp_path, path200):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert run_cli("run", "--graph", path200, "--r", 2, "--uniform-ball", 600, "--out", d) == 0
    for name in os.listdir(dirs[0]):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name


def test_run_rejects_cycles(tmp_path):
    g = tmp_path / "tri.json"
    g.write_text(json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]]}))
    assert run_cli("run", "--graph", g, "--r", 1, "--uniform-ball", 2, "--out", tmp_path / "o") == 2


def test_run_insufficient_invariance(tmp_path, path200):
    lam = tmp_path / "point.json"
    lam.write_text(json.dumps({str(x): {str(x): "1"} for x in range(200)}))
    out = tmp_path / "o"
    assert run_cli("run", "--graph", path200, "--r", 1, "--lambda", lam, "--out", out) == 2
    rep = load(out / "report.json")
    assert not rep["ok"] and rep["invariance"]["measured"] == "2"
    assert rep["error"]["type"] == "InsufficientInvariance"


def test_run_rejects_nonpositive_radius(tmp_path, path200):
    assert run_cli("run", "--graph", path200, "--r", 0, "--uniform-ball", 5, "--out", tmp_path) == 2


def test_verify_round_trip_and_mutation(tmp_path, path200, capsys):
    out = tmp_path / "run"
    run_cli("run", "--graph", path200, "--r", 2, "--uniform-ball", 600, "--out", out)
    w = out / "witness.json"
    assert run_cli("verify", "--graph", path200, "--witness", w) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ok"] and rep["mode"] == "exhaustive" and rep["balls_checked"] == 200

    # pull a far vertex into the first class: classes become disconnected and too wide
    data = load(w)
    moved = data["blocks"][-1].pop()
    data["blocks"][0].append(moved)
    data["blocks"] = [b for b in data["blocks"] if b]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run_cli("verify", "--graph", path200, "--witness", bad, "--max-classes", 2) == 1
    err = capsys.readouterr().err
    assert "exceeds the diameter bound" in err
    assert f"vertex {moved}" in err or "contains 0" in err

    data["blocks"][0].remove(moved)
    bad.write_text(json.dumps(data))
    assert run_cli("verify", "--graph", path200, "--witness", bad) == 2


def test_verify_sampling_needs_large_graph(tmp_path, path200):
    out = tmp_path / "run"
    run_cli("run", "--graph", path200, "--r", 2, "--uniform-ball", 600, "--out", out)
    w = out / "witness.json"
    assert run_cli("verify", "--graph", path200, "--witness", w, "--sample", 10, "--seed", 1) == 2


def test_parse_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("verify", "--graph", bad, "--witness", bad) == 2
    assert run_cli("report", tmp_path / "missing") == 2
    with pytest.raises(SystemExit) as info:
        run_cli("run", "--graph", bad)
    assert info.value.code == 2


def test_atomic_write_leaves_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "x.json"
    io.write_json(target, {"a": 1})

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        io.write_json(target, {"a": 2})
    assert load(target) == {"a": 1}
    assert os.listdir(tmp_path) == ["x.json"]


def test_worker_override(monkeypatch):
    monkeypatch.delenv("TREECOVER_WORKERS", raising=False)
    assert _accel.worker_count() == 1
    monkeypatch.setenv("TREECOVER_WORKERS", "3")
    assert _accel.worker_count() == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "treecover.cli", "gen", "star", "--leaves", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["edges"] == [[0, 1], [0, 2], [0, 3]]
