import csv
import io
import json
import subprocess
import sys

import pytest

from boolsketch.cli import main, summarize
from boolsketch.fourier import SparsePolynomial
from boolsketch.hypergraph import Hypergraph


def run(*argv):
    return main([str(a) for a in argv])


def read_json(path):
    return json.loads(path.read_text())


def drop_timing(obj):
    obj = dict(obj)
    obj.pop("timing", None)
    return obj


# -- gen ---------------------------------------------------------------------


def test_gen_poly_positive(tmp_path):
    assert run("gen", "--kind", "poly", "--n", 30, "--s", 3, "--condition", "positive", "--seed", 1, "--out", tmp_path) == 0
    f = SparsePolynomial.from_json(read_json(tmp_path / "planted.json")["polynomial"])
    assert f.n == 30 and f.sparsity == 3
    assert all(c > 0 for c in f.terms.values())


def test_gen_graph_no_singletons(tmp_path):
    assert run("gen", "--kind", "graph", "--n", 200, "--s", 3, "--d", 4, "--seed", 2, "--out", tmp_path) == 0
    G = Hypergraph.from_json(read_json(tmp_path / "planted.json")["hypergraph"])
    assert G.s == 3 and all(2 <= len(e) <= 4 for e in G.edges)


@pytest.mark.parametrize("kind", ["poly", "graph", "log"])
def test_gen_same_seed_identical_files(tmp_path, kind):
    argv = ["gen", "--kind", kind, "--n", 20, "--s", 2, "--d", 3, "--m", 50, "--seed", 7]
    if kind == "log":
        argv = ["gen", "--kind", "log", "--users", 100, "--rate", 3, "--duration", 3600, "--seed", 7]
    assert run(*argv, "--out", tmp_path / "a") == 0
    assert run(*argv, "--out", tmp_path / "b") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# -- learn / sketch ------------------------------------------------------------


def test_learn_recovers_planted(tmp_path):
    assert run("gen", "--kind", "poly", "--n", 20, "--s", 3, "--seed", 3, "--out", tmp_path) == 0
    out = tmp_path / "result.json"
    assert run("learn", "--input", tmp_path / "planted.json", "--s", 3, "--m", 256, "--seed", 3, "--out", out) == 0
    rep = read_json(out)
    assert rep["status"] == "ok" and rep["exact"] is True
    assert SparsePolynomial.from_json(rep["polynomial"]).max_abs_error(SparsePolynomial.from_json(rep["planted"])) <= 1e-6


def test_learn_from_recorded_samples(tmp_path):
    assert run("gen", "--kind", "poly", "--n", 12, "--s", 2, "--m", 600, "--seed", 4, "--out", tmp_path) == 0
    out = tmp_path / "result.json"
    assert run("learn", "--samples", tmp_path / "samples.csv", "--s", 2, "--m1", 200, "--m", 200, "--out", out) == 0
    f = SparsePolynomial.from_json(read_json(tmp_path / "planted.json")["polynomial"])
    assert SparsePolynomial.from_json(read_json(out)["polynomial"]).max_abs_error(f) <= 1e-6


def test_learn_understated_s_exits_2(tmp_path):
    assert run("gen", "--kind", "poly", "--n", 20, "--s", 4, "--seed", 4, "--out", tmp_path) == 0
    out = tmp_path / "result.json"
    code = run("learn", "--input", tmp_path / "planted.json", "--s", 1, "--m1", 40, "--m", 100, "--seed", 0, "--out", out)
    assert code == 2
    rep = read_json(out)
    assert rep["status"] == "failed" and rep["stage"] == "candidate_support"


def test_learn_noisy_reports_error(tmp_path):
    argv = ["--n", 12, "--s", 2, "--eps", 0.05, "--nu", 0.05, "--seed", 5]
    assert run("gen", "--kind", "poly", "--condition", "separated", *argv, "--out", tmp_path) == 0
    out = tmp_path / "result.json"
    assert run("learn", "--input", tmp_path / "planted.json", "--m", 3000, *argv, "--out", out) == 0
    assert read_json(out)["l2_error"] <= 13 * 0.1


def test_sketch_single_edge(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 10, "edges": [[2, 5, 7]]}))
    out = tmp_path / "r.json"
    assert run("sketch", "--input", g, "--seed", 1, "--out", out) == 0
    rep = read_json(out)
    assert rep["exact"] is True
    assert Hypergraph.from_json(rep["edges"]) == Hypergraph.from_json(json.loads(g.read_text()))


def test_json_identical_modulo_timing(tmp_path):
    assert run("gen", "--kind", "graph", "--n", 40, "--s", 2, "--d", 3, "--seed", 6, "--out", tmp_path) == 0
    reps = []
    for name in ("a.json", "b.json"):
        assert run("sketch", "--input", tmp_path / "planted.json", "--seed", 6, "--out", tmp_path / name) == 0
        reps.append(read_json(tmp_path / name))
    assert "timing" in reps[0]
    assert drop_timing(reps[0]) == drop_timing(reps[1])


# -- ingest ------------------------------------------------------------------


def test_ingest_writes_windows(tmp_path):
    assert run("gen", "--kind", "log", "--users", 300, "--rate", 6, "--duration", 3600, "--seed", 8, "--out", tmp_path) == 0
    out = tmp_path / "win"
    code = run("ingest", "--log", tmp_path / "messages.log", "--zipcodes", "78701,78702,78703", "--learn", "--d", 4,
               "--seed", 8, "--out", out)
    man = read_json(out / "manifest.json")
    assert len(man["windows"]) == 6
    for entry in man["windows"]:
        assert (out / entry["file"]).exists()
        if entry["diagnostics"]["s"] > 0:
            assert "recovered" in entry
    assert code == (2 if any(e.get("error") for e in man["windows"]) else 0)


def test_ingest_malformed_log_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.log"
    bad.write_text("1 1 a 78701 b n\n1 2 a 78701\n")
    assert run("ingest", "--log", bad, "--zipcodes", "78701") == 1
    assert "line 2" in capsys.readouterr().err


def test_missing_input_exits_1(tmp_path):
    assert run("learn", "--input", tmp_path / "nope.json", "--s", 2) == 1
    assert run("ingest", "--log", tmp_path / "nope.log", "--zipcodes", "1") == 1


# -- bench -------------------------------------------------------------------


def test_bench_single_trial(tmp_path):
    assert run("bench", "--kind", "graph", "--sweep", "alpha", "--values", 400, "--n", 20, "--s", 1, "--d", 3,
               "--trials", 1, "--out", tmp_path) == 0
    with open(tmp_path / "trials.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    summary = read_json(tmp_path / "summary.json")
    assert summary["points"][0]["trials"] == 1


def test_bench_summary_recomputable_and_jobs_invariant(tmp_path):
    argv = ["bench", "--kind", "poly", "--sweep", "alpha", "--values", "20,80", "--n", 12, "--s", 2, "--m", 128,
            "--trials", 6, "--seed", 3]
    assert run(*argv, "--jobs", 1, "--out", tmp_path / "a") == 0
    assert run(*argv, "--jobs", 2, "--out", tmp_path / "b") == 0
    rows = []
    for name in ("a", "b"):
        with open(tmp_path / name / "trials.csv") as fh:
            rows.append([{k: v for k, v in r.items() if k != "seconds"} for r in csv.DictReader(fh)])
    assert rows[0] == rows[1]
    with open(tmp_path / "a" / "trials.csv") as fh:
        raw = list(csv.DictReader(fh))
    for r in raw:
        r["point"] = int(r["point"])
        r["success"] = r["success"] == "True"
        r["samples"] = int(r["samples"])
    stored = read_json(tmp_path / "a" / "summary.json")["points"]
    assert [p["successes"] for p in summarize(raw)] == [p["successes"] for p in stored]
    assert [p["mean_samples"] for p in summarize(raw)] == [p["mean_samples"] for p in stored]


def test_bench_runtime_sweep_subquadratic(tmp_path):
    assert run("bench", "--kind", "graph", "--sweep", "n", "--values", "100,200,400", "--s", 1, "--d", 3,
               "--trials", 5, "--seed", 1, "--out", tmp_path) == 0
    pts = read_json(tmp_path / "summary.json")["points"]
    assert all(p["success_rate"] >= 0.8 for p in pts)
    with open(tmp_path / "trials.csv") as fh:
        rows = list(csv.DictReader(fh))
    med = []
    for i in range(3):
        secs = sorted(float(r["seconds"]) for r in rows if int(r["point"]) == i)
        med.append(secs[len(secs) // 2])
    # quadratic growth over a 4x range would be 16x
    assert med[2] / med[0] < 16


# -- usage and config ----------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["gen", "--n", "0", "--s", "2"],
        ["gen", "--kind", "poly", "--n", "10"],
        ["learn", "--s", "2"],
        ["bench", "--s", "1", "--d", "3", "--n", "10"],
        ["gen", "--eps", "-1", "--n", "5", "--s", "1"],
    ],
)
def test_usage_errors_exit_1(argv):
    assert main(argv) == 1


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "n": 8, "gen": {"s": 2, "kind": "poly"}}))
    assert run("gen", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run("gen", "--config", cfg, "--n", 9, "--out", tmp_path / "b") == 0
    assert run("gen", "--kind", "poly", "--n", 8, "--s", 2, "--seed", 11, "--out", tmp_path / "c") == 0
    a = read_json(tmp_path / "a" / "planted.json")["polynomial"]
    b = read_json(tmp_path / "b" / "planted.json")["polynomial"]
    assert a["n"] == 8 and b["n"] == 9
    assert (tmp_path / "a" / "planted.json").read_bytes() == (tmp_path / "c" / "planted.json").read_bytes()


def test_config_unknown_key_exits_1(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sparsity": 3}))
    assert run("gen", "--config", cfg, "--n", 5, "--s", 1) == 1


def test_console_script_and_log_env(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "boolsketch", "gen", "--kind", "poly", "--n", "6", "--s", "2", "--seed", "1"],
        capture_output=True,
        text=True,
        env={"BOOLSKETCH_LOG": "debug", "PATH": ""},
    )
    assert proc.returncode == 0
    assert json.load(io.StringIO(proc.stdout))["kind"] == "poly"
