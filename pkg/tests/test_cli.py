import json

import pytest

from ftspanner.cli import main
from ftspanner.graphs import load_graph
from ftspanner.result import SpannerResult


def run(*args):
    return main([str(a) for a in args])


def test_gen_build_verify_roundtrip(tmp_path):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    rep = tmp_path / "rep.json"
    assert run("gen", "--kind", "gnp", "--n", 30, "--p", 0.4, "--seed", 7,
               "-o", g) == 0
    assert run("build", "--graph", g, "--algo", "meta", "--f", 1, "--k", 2,
               "--seed", 3, "-o", r) == 0
    assert run("verify", "--graph", g, "--result", r, "-o", rep) == 0
    data = json.loads(rep.read_text())
    assert data["passed"] is True


def test_verify_rejects_wrong_graph(tmp_path):
    g1, g2 = tmp_path / "a.txt", tmp_path / "b.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "cycle", "--n", 6, "-o", g1)
    run("gen", "--kind", "cycle", "--n", 8, "-o", g2)
    run("build", "--graph", g1, "--f", 1, "--k", 2, "-o", r)
    assert run("verify", "--graph", g2, "--result", r) == 2


def test_verify_failure_exit_code(tmp_path):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "cycle", "--n", 6, "-o", g)
    graph = load_graph(g.read_text())
    heaviest = max(range(graph.m), key=graph.key)
    res = SpannerResult(algo="manual", n=graph.n, m=graph.m,
                        graph_sha=graph.sha(), params={},
                        edges=tuple(e for e in range(graph.m) if e != heaviest))
    r.write_text(res.to_json())
    assert run("verify", "--graph", g, "--result", r, "--f", 0, "--k", 2) == 1


def test_build_deterministic_files(tmp_path):
    g = tmp_path / "g.txt"
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    run("gen", "--kind", "gnp", "--n", 25, "--p", 0.4, "--seed", 2,
        "--weights", "1:50", "-o", g)
    for algo in ("meta", "meta-det", "warmup"):
        run("build", "--graph", g, "--algo", algo, "--f", 1, "--k", 2,
            "--seed", 4, "-o", r1)
        run("build", "--graph", g, "--algo", algo, "--f", 1, "--k", 2,
            "--seed", 4, "-o", r2)
        assert r1.read_bytes() == r2.read_bytes(), algo


def test_warmup_requires_k2(tmp_path):
    g = tmp_path / "g.txt"
    run("gen", "--kind", "cycle", "--n", 8, "-o", g)
    assert run("build", "--graph", g, "--algo", "warmup", "--f", 1, "--k", 3) == 2


def test_certificate_cycle_keeps_everything(tmp_path):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "cycle", "--n", 6, "-o", g)
    assert run("certificate", "--graph", g, "--lam", 2, "--check", "-o", r) == 0
    res = SpannerResult.from_json(r.read_text())
    assert set(res.edges) == set(range(6))


def test_certificate_tree_lambda1(tmp_path):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "tree", "--n", 20, "--seed", 3, "-o", g)
    assert run("certificate", "--graph", g, "--lam", 1, "--check", "-o", r) == 0
    res = SpannerResult.from_json(r.read_text())
    assert set(res.edges) == set(range(19))  # spans the tree


def test_certificate_lambda_too_large(tmp_path):
    g = tmp_path / "g.txt"
    run("gen", "--kind", "cycle", "--n", 6, "-o", g)
    assert run("certificate", "--graph", g, "--lam", 7) == 2


def test_simulate_equals_build(tmp_path):
    g = tmp_path / "g.txt"
    r1, r2 = tmp_path / "sim.json", tmp_path / "seq.json"
    run("gen", "--kind", "gnp", "--n", 25, "--p", 0.4, "--seed", 1, "-o", g)
    assert run("simulate", "--graph", g, "--f", 1, "--k", 2, "--seed", 5,
               "-o", r1) == 0
    assert run("build", "--graph", g, "--algo", "meta", "--f", 1, "--k", 2,
               "--seed", 5, "-o", r2) == 0
    sim = SpannerResult.from_json(r1.read_text())
    seq = SpannerResult.from_json(r2.read_text())
    assert sim.edges == seq.edges


def test_simulate_message_log_dump(tmp_path):
    import struct

    g = tmp_path / "g.txt"
    r = tmp_path / "sim.json"
    log = tmp_path / "m.bin"
    run("gen", "--kind", "gnp", "--n", 20, "--p", 0.4, "--seed", 1, "-o", g)
    assert run("simulate", "--graph", g, "--f", 1, "--k", 2,
               "--dump-log", log, "-o", r) == 0
    data = log.read_bytes()
    assert data.startswith(b"FTSLOG1\n")
    body = data[8:]
    rec = struct.calcsize("<IIIHB")
    assert body and len(body) % rec == 0
    rnd, src, dst, bits, tag = struct.unpack_from("<IIIHB", body, 0)
    assert rnd >= 1 and bits >= 1 and tag >= 1


def test_report_human_and_tsv(tmp_path, capsys):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "tree", "--n", 12, "--seed", 0, "-o", g)
    run("build", "--graph", g, "--f", 1, "--k", 2, "-o", r)
    assert run("report", "--result", r) == 0
    out1 = capsys.readouterr().out
    assert "edges: 11" in out1
    assert run("report", "--result", r) == 0
    assert capsys.readouterr().out == out1  # pure function of the file
    assert run("report", "--result", r, "--tsv") == 0
    assert capsys.readouterr().out.startswith("phase\t")


def test_report_zero_edge_graph(tmp_path, capsys):
    g = tmp_path / "g.txt"
    r = tmp_path / "r.json"
    run("gen", "--kind", "gnp", "--n", 2, "--p", 0.0, "-o", g)
    run("build", "--graph", g, "--f", 1, "--k", 2, "-o", r)
    run("report", "--result", r)
    assert "edges: 0" in capsys.readouterr().out


def test_report_missing_file():
    assert run("report", "--result", "/nonexistent/x.json") == 2


def test_hitting_set_command(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "ground": list(range(12)),
        "sets": [list(range(12))] * 3,
        "delta": 4.0,
    }))
    assert run("hitting-set", "--instance", inst) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["size"] <= 3


def test_mis_bench_tsv(tmp_path):
    out = tmp_path / "t.tsv"
    assert run("mis-bench", "--instances", 10, "--max-paths", 20,
               "--max-verts", 12, "-o", out) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 11
    assert all(line.split("\t")[-1] == "1" for line in lines[1:])


def test_bench_small(tmp_path):
    out = tmp_path / "b.tsv"
    assert run("bench", "--suite", "f-sweep", "--n", 60, "--m", 300, "--k", 2,
               "--f", "1,2", "--seeds", 2, "-o", out) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3


def test_usage_error_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("build", "--graph", "x")  # missing --f
    assert exc.value.code == 2
