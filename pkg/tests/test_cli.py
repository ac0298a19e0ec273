import json
from pathlib import Path

import pytest

from flowhom.cli import main, render, run
from flowhom.ingest import parse_flow, serialize_flow, builtin

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

CASES = {
    "homology_swiss": ["homology", "--builtin", "swiss"],
    "homology_dirseg_merging": ["homology", "--builtin", "dirseg", "--merging"],
    "homology_branch2_per_state": ["homology", "--builtin", "branch2", "--per-state"],
    "les_phi": ["les", "--builtin", "phi"],
    "check_t_phi": ["check-t", "--builtin", "phi"],
    "check_t_sq_sub": ["check-t", str(DATA / "sq.flow"), str(DATA / "sq_sub.flow"), "--map", str(DATA / "sq_sub.map")],
    "pv_1x1": ["pv", "--grid", "1x1"],
    "pv_2x1_both": ["pv", "--grid", "2x1", "--forbidden", "(0,0),(1,0)"],
    "oracle_branch2": ["oracle", "--builtin", "branch2"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code = main(CASES[name] + ["--no-timing"])
    assert code == 0
    assert capsys.readouterr().out == (GOLDEN / f"{name}.txt").read_text()


def test_machine_and_human_come_from_one_report(capsys):
    args = ["homology", "--builtin", "swiss", "--per-state", "--no-timing"]
    report, code, _ = run(args)
    main(args + ["--format", "machine"])
    machine = json.loads(capsys.readouterr().out)
    assert machine == json.loads(json.dumps(report))
    assert render(machine) == render(report)
    assert [row["group"] for row in machine["groups"]] == ["Z^2", "Z^2", "0"]
    assert machine["groups"][1] == {"degree": 1, "group": "Z^2", "betti": 2, "torsion": []}


def test_per_state_rows(capsys):
    report, _, _ = run(["homology", "--builtin", "branch2", "--per-state"])
    row = [r for r in report["per_state"] if r["state"] == "(0,0,0)"][0]
    assert row["reduced"][1] == "Z"


def test_exit_code_for_parse_errors(capsys):
    assert main(["homology", str(DATA / "bad_square.flow")]) == 1
    err = capsys.readouterr().err
    assert "bad_square.flow:3:" in err
    assert main(["homology", "missing.flow"]) == 1
    assert main(["homology", "--builtin", "nope"]) == 1
    assert main(["homology", "--builtin", "phi"]) == 1
    assert main(["pv", "--grid", "2x2", "--forbidden", "(5,5)"]) == 1
    assert main(["pv", "--grid", "two"]) == 1


def test_exit_code_for_failed_verification(capsys, tmp_path):
    b1 = tmp_path / "b1.flow"
    b1.write_text(serialize_flow(builtin("branch1")))
    d = tmp_path / "d.flow"
    d.write_text(serialize_flow(builtin("dirseg")))
    m = tmp_path / "incl.map"
    m.write_text("map incl\nstate 0 -> 0\nstate 1 -> 1\ngen u -> [0,1]\n")
    assert main(["check-t", str(d), str(b1), "--map", str(m)]) == 2
    out = capsys.readouterr().out
    assert "(3) new states surrounded by image states: FAIL" in out


def test_les_identity(capsys):
    assert main(["les", "--builtin", "swiss", "--map", "identity", "--format", "machine"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["exact"] and set(report["groups"]["cone"]) == {"0"}
    assert all(node["exact"] for node in report["nodes"])


def test_pv_writes_file(tmp_path, capsys):
    out = tmp_path / "swiss.flow"
    assert main(["pv", "--grid", "5x5", "--forbidden", "plus", "--out", str(out)]) == 0
    assert "36 states, 56 edges, 20 squares" in capsys.readouterr().out
    assert parse_flow(out.read_text()).generators == builtin("swiss").generators


def test_oracle_commands(capsys):
    for name in ("dirseg", "seg2", "branch1", "branch2", "swiss"):
        assert main(["oracle", "--builtin", name]) == 0
    capsys.readouterr()
    assert main(["oracle", "--builtin", "swiss", "--max-dim", "3", "--format", "machine"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["agree"] and report["mismatches"] == [] and report["max_dim"] == 3


def test_max_dim_only_lowers(capsys):
    report, _, _ = run(["homology", "--builtin", "branch2", "--max-dim", "1"])
    assert [r["group"] for r in report["groups"]] == ["Z^3", "Z^3"]
    report, _, _ = run(["homology", "--builtin", "branch2", "--max-dim", "9"])
    assert len(report["groups"]) == 3
