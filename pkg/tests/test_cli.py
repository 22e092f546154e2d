import json

import pytest

from sparsestars.cli import main
from sparsestars.compiler import PulseSchedule, accumulated_coupling
from sparsestars.decompose import Decomposition
from sparsestars.graph import load_graph, save_graph
from sparsestars import bench


@pytest.fixture
def graph_file(tmp_path):
    g = bench.generate_instance("random-weighted", 8, 0.5, seed=2)
    p = tmp_path / "g.txt"
    save_graph(g, p)
    return g, str(p)


def test_generate_and_sparsify(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert main(["generate", "--kind", "tree", "--n", "6", "--out", str(out)]) == 0
    assert load_graph(out).m == 5
    sp = tmp_path / "s.txt"
    assert main(["sparsify", "--graph", str(out), "--q", "50", "--seed", "1", "--out", str(sp)]) == 0
    info = json.loads(capsys.readouterr().err)
    assert info["q"] == 50 and load_graph(sp).m == info["m_sparse"]


def test_decompose_compile_round_trip(graph_file, tmp_path, capsys):
    g, path = graph_file
    dj = tmp_path / "d.json"
    assert main(["decompose", "--graph", path, "--epsilon", "0.5", "--check", "--out", str(dj)]) == 0
    info = json.loads(capsys.readouterr().err)
    assert info["violations"] == 0
    d = Decomposition.from_json(dj.read_text())
    sj = tmp_path / "s.jsonl"
    assert main(["compile", "--decomposition", str(dj), "--out", str(sj)]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header == "n_pulses,n_bitflips,n_total_ops,T"
    sched = PulseSchedule.from_jsonl(g.n, sj.read_text())
    assert abs(accumulated_coupling(sched) - d.effective_graph().adjacency()).max() < 1e-9


def test_maxcut(graph_file, capsys):
    _, path = graph_file
    assert main(["maxcut", "--graph", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["exact"] and out["value"] > 0
    assert main(["maxcut", "--graph", path, "--compare", path]) == 0
    assert json.loads(capsys.readouterr().out)["ratio"] == 1.0


def test_landscape(graph_file, tmp_path, capsys):
    _, path = graph_file
    out = tmp_path / "l.csv"
    assert main(["landscape", "--cost", path, "--Gamma", "0.01", "--step", "0.05", "--out", str(out)]) == 0
    summ = json.loads(capsys.readouterr().err)
    assert summ["T_unit"] > 0 and summ["cost_star"] < 0
    assert out.read_text().startswith("gamma,beta,cost\n")


def test_bench_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "b"
    rc = main(["bench", "--n", "7", "--kind", "random-weighted", "--density", "0.5", "--count", "2",
               "--q", "0.5m", "none", "--eps2", "0.5", "--out", str(out)])
    assert rc == 0
    assert len(bench.read_records(out / "runs.csv")) == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("4 2\n1 2 1\n3 4 1\n")
    assert main(["bench", "--instances", str(bad), "--out", str(tmp_path / "c")]) == 1


def test_bench_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"generate": {"kind": "tree", "n": 5, "count": 1}, "grid_step": 0.3}))
    assert main(["bench", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_bad_input_reports_error(tmp_path, capsys):
    bad = tmp_path / "x.txt"
    bad.write_text("3 1\n1 1 2.0\n")
    assert main(["maxcut", "--graph", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["maxcut", "--graph", str(tmp_path / "missing.txt")]) == 2
