import csv
import io
import json
import os
import subprocess
import sys

import numpy as np

from dominograph import cli, fixture_text

import oracles


def run(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    old = dict(os.environ)
    if env:
        os.environ.update(env)
    try:
        code = cli.main(list(argv), out=out, err=err)
    finally:
        os.environ.clear()
        os.environ.update(old)
    return code, out.getvalue(), err.getvalue()


def test_build_dot():
    code, out, _ = run("build", "-n", "6", "-q", "2", "-t", "0", "--format", "dot")
    assert code == 0
    assert out.count("[label=") == 32
    assert out.count("style=dashed") == 1024
    assert out.count("style=solid") == 32


def test_build_single_vertex():
    code, out, _ = run("build", "-n", "1", "-q", "2", "-t", "0")
    assert code == 0
    assert out.count("[label=") == 1
    assert out.count("v0 -> v0 [color=blue, style=solid]") == 1
    assert out.count("v0 -> v0 [color=red, style=dashed]") == 1


def test_build_json():
    code, out, _ = run("build", "-n", "3", "-q", "2", "-t", "1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["squares"]) == 16 and doc["data"]["n"] == 3


def test_build_size_limit():
    code, out, err = run("build", "-n", "6", "-q", "9", "-t", "0")
    assert code == 3 and out == "" and "limit" in err
    code, _, _ = run("build", "-n", "3", "-q", "9", "-t", "0", "--vertex-limit", "80")
    assert code == 3
    code, _, _ = run("build", "-n", "3", "-q", "9", "-t", "0", "--vertex-limit", "none")
    assert code == 0


def test_usage_errors():
    assert run("build", "-n", "0", "-q", "2")[0] == 2
    assert run("build", "-n", "3", "-q", "2", "-t", "5")[0] == 2
    assert run("bogus")[0] == 2
    assert run("table", "-n", "3", "-q", "2", "--traces", "7")[0] == 2
    assert run("build", "-n", "3", "-q", "2", "--vertex-limit", "abc")[0] == 2


def test_table_matches_fixture():
    code, out, _ = run("table", "-n", "6", "-q", "2")
    assert code == 0
    assert out == fixture_text("necklaces_6_2.txt")


def test_table_small_cases():
    _, out, _ = run("table", "-n", "1", "-q", "2")
    assert "[0]       1       0" in out and "[1]       1       1" in out
    _, out, _ = run("table", "-n", "4", "-q", "2", "--traces", "0")
    assert [ln.split()[0] for ln in out.splitlines() if ln.startswith("[")] == \
        ["[0000]", "[0011]", "[0101]", "[1111]"]


def test_table_csv():
    code, out, _ = run("table", "-n", "3", "-q", "12", "--traces", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["trace", "necklace", "period", "lyndon_subword"]
    assert ["1", "0,0,1", "3", "0,0,1"] in rows
    assert sum(int(r[2]) for r in rows[1:]) == 144


def test_cycles():
    code, out, _ = run("cycles", "-n", "6", "-q", "2", "-t", "0")
    lines = out.splitlines()
    assert code == 0 and lines[-1] == "MATCH"
    table = {int(ln.split()[0]): int(ln.split()[1]) for ln in lines[2:-1]}
    assert table == {1: 2, 2: 0, 3: 2, 6: 4}
    code, out, _ = run("cycles", "-n", "1", "-q", "3", "-t", "2", "--format", "json")
    assert json.loads(out) == {"data": [1, 3, 2], "formula": {"1": 1}, "orbits": {"1": 1},
                               "match": True}
    _, out, _ = run("cycles", "-n", "4", "-q", "2", "-t", "0", "--format", "json")
    assert json.loads(out)["formula"] == {"1": 2, "2": 1, "4": 1}


def test_cycles_mismatch_exit_code(monkeypatch):
    monkeypatch.setattr(cli.domino, "blue_cycle_counts", lambda data: {1: 99})
    code, out, _ = run("cycles", "-n", "2", "-q", "3", "-t", "0")
    assert code == 1 and out.rstrip().endswith("MISMATCH")


def test_verify_all():
    code, out, _ = run("verify", "-n", "3", "-q", "2", "-t", "0", "--suite", "all")
    assert code == 0
    assert "axioms: PASS" in out and "iso: PASS" in out and "paths: PASS" in out


def test_verify_degenerate_iso():
    code, out, _ = run("verify", "-n", "2", "-q", "2", "-t", "0", "--suite", "iso")
    assert code == 0
    assert "NOTE: degenerate case" in out and "skipped" in out


def test_verify_tampered():
    code, out, _ = run("verify", "-n", "3", "-q", "2", "-t", "0", "--suite", "axioms",
                       "--tamper-square", "5")
    assert code == 1
    assert "axioms: FAIL" in out
    assert "missing red-blue value" in out
    code, out, _ = run("verify", "-n", "1", "-q", "2", "-t", "0", "--suite", "axioms",
                       "--tamper-square", "0", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False and doc["suites"]["axioms"]["violations"]


def test_verify_paths_limit_and_override():
    code, _, err = run("verify", "-n", "6", "-q", "2", "-t", "0", "--suite", "paths")
    assert code == 3 and "--max-degree" in err
    code, out, _ = run("verify", "-n", "6", "-q", "2", "-t", "0", "--suite", "paths",
                       "--max-degree", "1,1")
    assert code == 0 and "degree <= (1,1)" in out


def test_config_file_and_env(tmp_path):
    conf = tmp_path / "limits.conf"
    conf.write_text("# small limits\nvertex_limit = 8\n")
    code, _, _ = run("build", "-n", "5", "-q", "2", "--config", str(conf))
    assert code == 3
    code, _, _ = run("build", "-n", "5", "-q", "2", "--config", str(conf),
                     env={"DOMINOGRAPH_VERTEX_LIMIT": "16"})
    assert code == 0
    # flags beat the environment
    code, _, _ = run("build", "-n", "5", "-q", "2", "--vertex-limit", "8",
                     env={"DOMINOGRAPH_VERTEX_LIMIT": "16"})
    assert code == 3
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    assert run("build", "-n", "2", "-q", "2", "--config", str(bad))[0] == 2


def test_ktheory():
    code, out, _ = run("ktheory", "-n", "6", "-q", "2", "-t", "0")
    assert code == 0 and "K0: Z/31" in out and "K1: Z/31" in out and "CIRCLE" in out
    _, out, _ = run("ktheory", "-n", "1", "-q", "7", "-t", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["k0"]["text"] == "Z^2" and doc["primitive_ideal_space"] == "TORUS_2"
    _, out, _ = run("ktheory", "-n", "2", "-q", "2", "-t", "0")
    assert "K0: 0" in out and "K1: 0" in out


def test_graph_checks(tmp_path):
    k3 = tmp_path / "k3.txt"
    k3.write_text("".join(f"{a} {b}\n" for a in range(3) for b in range(3)))
    code, out, _ = run("graph", str(k3), "--check", "n-connected=1")
    assert code == 0
    assert out == "vertices: 3\nedges: 9\nn-connected=1: true\n"
    c2 = tmp_path / "c2.txt"
    c2.write_text("0 1\n1 0\n")
    _, out, _ = run("graph", str(c2), "--check", "period")
    assert out.splitlines()[-1] == "period: 2"
    assert run("graph", str(c2), "--check", "nonsense")[0] == 2
    assert run("graph", str(tmp_path / "missing.txt"))[0] == 2


def test_graph_random_against_oracle(tmp_path):
    rng = np.random.default_rng(7)
    for trial in range(20):
        adj = (rng.random((6, 6)) < 0.35).astype(int)
        edges = [(a, b) for a in range(6) for b in range(6) if adj[a, b]]
        if not edges:
            continue
        f = tmp_path / f"g{trial}.txt"
        f.write_text("".join(f"{a} {b}\n" for a, b in edges))
        _, out, _ = run("graph", str(f), "--format", "json")
        doc = json.loads(out)
        # vertices without edges are not in the file
        used = sorted({x for e in edges for x in e})
        sub = adj[np.ix_(used, used)]
        assert doc["strongly-connected"] == oracles.strongly_connected(sub)
        want = oracles.bool_matrix_power_exponent(sub, (len(used) - 1) ** 2 + 1)
        assert doc["min-connectivity-exponent"] == want


def test_deterministic_and_timestamps():
    a = run("table", "-n", "5", "-q", "3")[1]
    b = run("table", "-n", "5", "-q", "3")[1]
    assert a == b
    c = run("table", "-n", "5", "-q", "3", "--timestamps")[1]
    assert c.startswith("# generated ") and c.split("\n", 1)[1] == a


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "dominograph", "ktheory", "-n", "3",
                           "-q", "2", "-t", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "K0: Z/3" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "dominograph", "build", "-n", "9",
                           "-q", "4"], capture_output=True, text=True)
    assert proc.returncode == 3
