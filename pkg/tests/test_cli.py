from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hyperfin.cli import main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv: str):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_group_ball_and_mul(capsys):
    code, data = run_json(capsys, "group", "ball", "--group", "F2", "--radius", "1")
    assert code == 0 and len(data["words"]) == 5
    code, data = run_json(capsys, "group", "mul", "--group", "C2^3", "a.b", "b.c")
    assert code == 0 and data["product"] == "a.c"


def test_dyn_commands(capsys):
    code, data = run_json(capsys, "dyn", "w", "--group", "F1", "--pairs", "1=t,t=t^2")
    assert code == 0 and data["defined"]
    assert data["result"]["entries"] == [["1", "t"], ["t^-1", "1"]]
    code, data = run_json(capsys, "dyn", "act", "--group", "C2^3", "--pairs", "1=a", "--element", "b")
    assert data["entries"] == [["b", "b.a"]]
    code, data = run_json(capsys, "dyn", "orbit", "--group", "C2^3", "--pairs", "1=a,a=a.b")
    assert (data["orbit_count"], data["begins"], data["ends"]) == (1, "1", "a.b")


def test_game_play_replay_adjudicate(capsys, tmp_path):
    code, out, _ = run(capsys, "game", "play", "--player-one", "random", "--player-two", "random", "--seed", "5")
    assert code == 0
    path = tmp_path / "t.json"
    path.write_text(out)
    code, again, _ = run(capsys, "game", "replay", "--input", str(path))
    assert code == 0 and again == out
    data = json.loads(out)
    data["moves"][0]["assignments"][0][1] = "b"
    path.write_text(json.dumps(data))
    code, _, _ = run(capsys, "game", "replay", "--input", str(path))
    assert code == 1
    code, verdict = run_json(capsys, "game", "adjudicate", "--input", str(tmp_path / "t.json"), "--radius", "1")
    assert code == 0 and "winner" in verdict


def test_game_delta_ender_reports_illegal(capsys):
    code, data = run_json(capsys, "game", "play", "--player-one", "delta-ender")
    assert data["verdict"]["reason"] == "illegal-move"


@pytest.mark.parametrize("kind", ["functional", "cayley", "degree2", "random"])
def test_graph_gen_and_export(capsys, tmp_path, kind):
    code, out, _ = run(capsys, "graph", "gen", "--kind", kind, "--n", "12", "--seed", "1")
    assert code == 0
    path = tmp_path / "g.json"
    path.write_text(out)
    code, dot, _ = run(capsys, "export", "dot", "--input", str(path))
    assert code == 0 and dot.startswith("graph ")
    code, again, _ = run(capsys, "export", "json", "--input", str(path))
    assert code == 0 and json.loads(again)


def test_graph_operations(capsys, tmp_path):
    _, out, _ = run(capsys, "graph", "gen", "--kind", "functional", "--n", "30", "--seed", "2")
    path = tmp_path / "f.json"
    path.write_text(out)
    for cmd in ("color", "recurrent", "contract"):
        code, data = run_json(capsys, "graph", cmd, "--input", str(path))
        assert code == 0, (cmd, data)


@pytest.mark.parametrize("kind", ["functional", "degree2", "spanning", "extension"])
def test_witness_pipeline(capsys, tmp_path, kind):
    code, out, _ = run(capsys, "witness", "build", "--kind", kind, "--n", "40", "--seed", "3")
    assert code == 0
    path = tmp_path / "w.json"
    path.write_text(out)
    code, rep = run_json(capsys, "witness", "validate", "--input", str(path))
    assert code == 0 and rep["valid"]
    code, stats = run_json(capsys, "witness", "stats", "--input", str(path))
    assert code == 0
    code, dot, _ = run(capsys, "witness", "build", "--kind", kind, "--n", "10", "--format", "dot")
    assert "level=" in dot


def test_witness_validate_failure_exits_one(capsys, tmp_path):
    _, out, _ = run(capsys, "witness", "build", "--kind", "functional", "--n", "20")
    data = json.loads(out)
    data["levels"] = data["levels"][::-1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, rep = run_json(capsys, "witness", "validate", "--input", str(path))
    assert code == 1 and rep["clause"] == "monotonicity"


def test_lll_commands(capsys):
    code, data = run_json(capsys, "lll", "check", "--n", "6")
    assert code == 0 and data["holds"]
    code, data = run_json(capsys, "lll", "check", "--n", "5")
    assert code == 1 and not data["holds"]
    code, data = run_json(capsys, "lll", "sweep", "--from", "1", "--to", "12")
    assert code == 0 and data["minimal_n"] == 6
    code, data = run_json(capsys, "lll", "prob", "--n", "2", "--method", "enumerate")
    assert data["p_R"] == {"num": 1, "den": 16} == data["expected"]
    code, data = run_json(capsys, "lll", "solve", "--n", "2", "--count", "3")
    assert code == 0 and data["solved"] == 3


def test_flows_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "flows", "gen", "--radius", "3", "--n", "2", "--seed", "4")
    assert code == 0
    path = tmp_path / "inst.json"
    path.write_text(out)
    code, data = run_json(capsys, "flows", "analyze", "--input", str(path), "--dump-flow")
    assert code == 0 and data["ok"] and data["flow"]
    code, data = run_json(capsys, "flows", "analyze", "--radius", "3", "--count", "3")
    assert code == 0 and len(data["runs"]) == 3


def test_jobs_keep_order(capsys):
    _, serial = run_json(capsys, "flows", "analyze", "--radius", "2", "--count", "4", "--seed", "9")
    _, parallel = run_json(capsys, "flows", "analyze", "--radius", "2", "--count", "4", "--seed", "9", "--jobs", "2")
    assert serial == parallel


def test_manifest_and_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 5\nradius = 3\n")
    m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
    code, data = run_json(capsys, "lll", "check", "--config", str(cfg), "--n", "6", "--manifest", str(m1))
    assert code == 0 and data["n"] == 6
    run(capsys, "lll", "check", "--config", str(cfg), "--n", "6", "--manifest", str(m2))
    a, b = json.loads(m1.read_text()), json.loads(m2.read_text())
    assert a == b
    assert a["subcommand"] == "lll check" and a["parameters"]["radius"] == 3 and a["parameters"]["n"] == 6
    assert len(a["digest"]) == 64


def test_usage_errors_exit_two(capsys, tmp_path):
    assert main(["group", "mul", "--group", "C2^3", "a.d"]) == 2
    assert main(["lll", "check", "--bogus"]) == 2
    assert main(["witness", "validate", "--input", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["export", "json", "--input", str(bad)]) == 2
    capsys.readouterr()


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "hyperfin", "lll", "check", "--n", "6"], capture_output=True, text=True
    )
    assert res.returncode == 0 and json.loads(res.stdout)["holds"]
