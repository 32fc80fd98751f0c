import csv
import io
import json
from importlib import resources

import pytest

from rcdmap.cli import main

KARATE = str(resources.files("rcdmap") / "data" / "karate.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", "--input", KARATE)
    d = json.loads(out)
    assert code == 0 and (d["n"], d["m"], d["max_degree"]) == (34, 78, 17)


def test_rank_csv(capsys):
    code, out, _ = run(capsys, "rank", "--method", "degree", "--input", KARATE, "--top", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["node"] for r in rows] == ["33", "0", "32"]
    assert [r["rank"] for r in rows] == ["1", "2", "3"]


def test_rank_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "rank", "--method", "pagerank", "--input", KARATE, "--top", "1")
    assert json.loads(out)[0]["node"] == 33


def test_global_flags_after_subcommand(capsys):
    code, out, _ = run(capsys, "rank", "--method", "pagerank", "--input", KARATE, "--top", "1", "--format", "json")
    assert json.loads(out)[0]["node"] == 33


def test_communities(capsys):
    code, out, _ = run(capsys, "communities", "--algorithm", "kclique", "--input", KARATE, "--k", "4")
    d = json.loads(out)
    assert code == 0 and d["overlapping"] in (True, False)
    assert set(d["membership"]) == {str(v) for v in range(34)}


def test_perturb_writes_edge_list(tmp_path, capsys):
    dest = tmp_path / "replica.txt"
    code, _, _ = run(capsys, "--seed", "3", "perturb", "--epsilon", "0", "--input", KARATE, "--output", str(dest))
    lines = [l for l in dest.read_text().splitlines() if l and not l.startswith("#")]
    assert code == 0 and len(lines) == 78


def test_rcdmap_with_sidecar(tmp_path, capsys):
    side = tmp_path / "rounds.json"
    code, out, _ = run(capsys, "rcdmap", "--method", "pagerank", "--detector", "lpa", "--rounds", "3",
                       "--seed", "1", "--input", KARATE, "--top", "6", "--sidecar", str(side))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6 and list(rows[0]) == ["rank", "node", "avg_score"]
    assert len(json.loads(side.read_text())["rounds"]) == 3


def test_sir(tmp_path, capsys):
    ts = tmp_path / "ts.csv"
    code, out, _ = run(capsys, "sir", "--input", KARATE, "--seeds", "0,33", "--runs", "50",
                       "--rng-seed", "2", "--timeseries", str(ts))
    d = json.loads(out)
    assert code == 0 and len(d["final_infected"]) == 50
    assert ts.read_text().startswith("t,s,i,r\n")


def test_lfr(tmp_path, capsys):
    g, c = tmp_path / "g.txt", tmp_path / "c.json"
    code, out, _ = run(capsys, "lfr", "--seed", "4", "--out-graph", str(g), "--out-communities", str(c))
    assert code == 0 and json.loads(out)["n"] == 250
    assert not json.loads(c.read_text())["overlapping"]


def test_anova(tmp_path, capsys):
    src = tmp_path / "results.csv"
    src.write_text("treatment,block,value\nA,x,1\nA,y,2\nA,z,2.2\nB,x,3\nB,y,5\nB,z,4\n")
    code, out, _ = run(capsys, "anova", "--input", str(src))
    head, _, tail = out.partition("}\n")
    assert code == 0 and json.loads(head + "}")["df_error"] == 2
    assert tail.startswith("LSD = ")


def test_errors_are_json(capsys):
    code, _, err = run(capsys, "rank", "--method", "degree", "--input", "/nonexistent/file.txt")
    assert code != 0 and json.loads(err)["type"] == "FileNotFoundError"
    with pytest.raises(SystemExit) as info:
        main(["rank", "--method", "katz", "--input", KARATE])
    assert info.value.code != 0
    assert "invalid choice" in json.loads(capsys.readouterr().err)["error"]


def test_bad_seed_list(capsys):
    code, _, err = run(capsys, "sir", "--input", KARATE, "--seeds", "a,b")
    assert code != 0 and "comma-separated" in json.loads(err)["error"]
