import csv
import io
import json
import subprocess
import sys

import pytest

from abtcore.cli import main
from abtcore.generators import random_bipartite
from abtcore.graph import write_edge_list

from conftest import DATA

DEMO = str(DATA / "demo_graph.txt")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def idx_dir(tmp_path, monkeypatch):
    d = tmp_path / "idx"
    monkeypatch.setenv("ABTCORE_INDEX_DIR", str(d))
    return d


def summary(text):
    line = [l for l in text.splitlines() if l.startswith("% |U|")][0]
    return dict(tok.split("=") for tok in line[2:].split())


def test_query_online_demo():
    code, out, _ = run("query", "-i", DEMO, "--alpha", "2", "--beta", "2", "--tau", "2", "--method", "online")
    assert code == 0
    s = summary(out)
    assert (s["|U|"], s["|L|"], s["|E|"]) == ("5", "5", "14")
    edges = {tuple(map(int, l.split())) for l in out.splitlines() if not l.startswith("%")}
    assert {u for u, _ in edges} == {1, 2, 3, 4, 5} and {v for _, v in edges} == {2, 3, 4, 5, 6}


def test_query_alpha_beyond_max_is_empty():
    code, out, _ = run("query", "-i", DEMO, "--alpha", "50", "--beta", "1", "--tau", "1")
    assert code == 0
    s = summary(out)
    assert (s["|U|"], s["|L|"], s["|E|"]) == ("0", "0", "0")


def test_query_json_and_csv():
    code, out, _ = run("query", "-i", DEMO, "--alpha", "1", "--beta", "2", "--tau", "1", "--format", "json")
    doc = json.loads(out)
    assert doc["upper"] == list(range(6)) and doc["lower"] == list(range(7))
    code, out, _ = run("query", "-i", DEMO, "--alpha", "1", "--beta", "2", "--tau", "1", "--format", "csv")
    assert out.splitlines()[0] == "upper,lower"


def test_missing_index_names_build_command(idx_dir):
    code, _, err = run("query", "-i", DEMO, "--alpha", "1", "--beta", "1", "--tau", "1", "--method", "total")
    assert code == 2
    assert "build-index" in err and "--kind total" in err


def test_usage_errors():
    assert run("query", "-i", DEMO, "--alpha", "0", "--beta", "1", "--tau", "1")[0] == 1
    assert run("query", "-i", DEMO, "--alpha", "1", "--beta", "1", "--tau", "-2")[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("query", "-i", DEMO, "--alpha", "1", "--beta", "1", "--tau", "1", "--method", "magic")[0] == 1
    assert run("bench", "-i", DEMO, "--methods", "online,nope")[0] == 1


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 0\n1 2 3\n")
    code, _, err = run("stats", "-i", str(bad))
    assert code == 2 and "line 2" in err
    assert run("stats", "-i", str(tmp_path / "missing.txt"))[0] == 2


def test_incompatible_index_is_data_error(tmp_path, idx_dir):
    assert run("build-index", "-i", DEMO, "--kind", "bt")[0] == 0
    other = tmp_path / "other.txt"
    other.write_text("0 0\n0 1\n1 0\n1 1\n")
    code, _, err = run("query", "-i", str(other), "--alpha", "1", "--beta", "1", "--tau", "1", "--method", "bt")
    assert code == 2 and "checksum" in err


def test_build_index_reports_time_and_size(idx_dir):
    code, out, _ = run("build-index", "-i", DEMO, "--kind", "all")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["kind"] for r in rows] == ["total", "ab", "bt", "at"]
    for r in rows:
        assert int(r["bytes"]) == (idx_dir / f"{r['kind']}.bcix").stat().st_size
        assert float(r["build_seconds"]) >= 0


def test_result_hash_method_independent(idx_dir):
    run("build-index", "-i", DEMO, "--kind", "all")
    hashes = set()
    for m in ("online", "total", "ab", "bt", "at", "hybrid"):
        code, out, _ = run("query", "-i", DEMO, "--alpha", "2", "--beta", "2", "--tau", "2", "--method", m)
        assert code == 0
        hashes.add(summary(out)["hash"])
    assert len(hashes) == 1


def test_bench_100_edge_graph(tmp_path, idx_dir):
    g = random_bipartite(15, 15, 100, seed=4)
    p = tmp_path / "g.txt"
    with p.open("w") as fh:
        write_edge_list(g, fh)
    code, out, _ = run("bench", "-i", str(p), "--queries", "15", "--build-missing")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert [r["method"] for r in rows] == ["online", "total", "ab", "bt", "at", "hybrid"]
    assert len({r["result_hash"] for r in rows}) == 1


def test_stats_count_decompose_profile_ingest(tmp_path):
    code, out, _ = run("stats", "-i", DEMO, "--format", "json")
    assert json.loads(out)["tau_max"] == 2
    code, out, _ = run("count", "-i", DEMO)
    assert out.startswith("butterflies=")
    code, out, _ = run("count", "-i", DEMO, "--edge", "3", "3")
    assert "butterflies=3" in out
    assert run("count", "-i", DEMO, "--edge", "0", "6")[0] == 2
    code, out, _ = run("decompose", "-i", DEMO)
    assert out.splitlines()[0] == "alpha,beta,layer,vertex,tau_max"
    code, out, _ = run("profile", "-i", DEMO, "--alpha", "1,2", "--beta", "1,2")
    assert out.splitlines()[0] == "alpha,beta,tau,upper,lower,edges,density,clustering"
    dst = tmp_path / "clean.txt"
    code, out, _ = run("ingest", "-i", DEMO, "-o", str(dst))
    assert code == 0 and "edges=18" in out and len(dst.read_text().splitlines()) == 18


def test_train_router_and_hybrid(tmp_path, idx_dir):
    g = random_bipartite(20, 20, 150, seed=2)
    p = tmp_path / "g.txt"
    with p.open("w") as fh:
        write_edge_list(g, fh)
    run("build-index", "-i", str(p), "--kind", "all")
    code, out, err = run("train-router", "-i", str(p), "--samples", "10", "--hidden", "5,10", "--training-csv", str(tmp_path / "t.csv"))
    assert code == 0, err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2 and sum(int(r["selected"]) for r in rows) == 1
    assert (idx_dir / "router.json").is_file()
    assert (tmp_path / "t.csv").read_text().startswith("alpha,beta,tau,t1,t2,t3,label")
    # too many samples for the 5% cap
    assert run("train-router", "-i", str(p), "--samples", "100000")[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "abtcore", "stats", "-i", DEMO], capture_output=True, text=True)
    assert r.returncode == 0 and "alpha_max=3" in r.stdout
