import json

import pytest

from bttp import cli, data
from bttp.formats import read_schedule
from bttp.model import Instance, Schedule


def test_every_fixture_loads_and_checks_out():
    for fid in data.fixture_ids():
        obj = data.load_fixture(fid)
        kind = data.fixture_info(fid).kind
        expected = {"instance": Instance, "schedule": Schedule, "cnf": str}[kind]
        assert isinstance(obj, expected), fid


def test_unknown_fixture_and_checksum(monkeypatch):
    with pytest.raises(data.FixtureError):
        data.fixture_info("nope")
    assert data.fixture_info("unsat-example.cnf").id == "unsat-example"
    bad = data.Fixture("npb", "instance", "npb.json", "0" * 64, "tampered")
    monkeypatch.setitem(data.FIXTURES, "npb", bad)
    with pytest.raises(data.FixtureError):
        data.fixture_text("npb")
    with pytest.raises(data.FixtureError):
        data.paired_instance("nba")


def run(capsys, *argv):
    code = cli.main(["--json", *argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_validate_and_bounds(capsys):
    code, out = run(capsys, "validate", "table8")
    assert code == 0 and out["total"] == 42950 and out["feasible"]
    code, out = run(capsys, "bounds", "npb")
    assert code == 0 and out["total"] == 42763


def test_brute_and_enumerate(capsys):
    code, out = run(capsys, "brute", "six-point")
    assert code == 0
    assert out["optimum"] == pytest.approx(133.646, abs=1e-3)
    code, out = run(capsys, "enumerate", "--n", "2")
    assert code == 0


def test_solve_writes_schedule(tmp_path, capsys):
    path = tmp_path / "opt.txt"
    code, out = run(capsys, "solve", "six-point", "-o", str(path))
    assert code == 0
    inst = data.load_fixture("six-point")
    sched = read_schedule(path, inst)
    assert sched.key() in {data.load_fixture("table2-a").key(), data.load_fixture("table2-b").key()}


def test_decide_reduce_construct(tmp_path, capsys):
    code, out = run(capsys, "decide", "unsat-example")
    assert code == 0 and out["satisfiable"] is False
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n")
    code, out = run(capsys, "decide", str(cnf))
    assert code == 0 and out["satisfiable"] is True
    code, out = run(capsys, "reduce", str(cnf), "-o", str(tmp_path / "red.json"))
    assert code == 0 and (tmp_path / "red.json").exists()
    code, out = run(capsys, "construct", "npb")
    assert code == 0


def test_error_codes(tmp_path, capsys):
    assert cli.main(["validate", str(tmp_path / "missing.txt"), "--instance", "npb"]) == cli.EXIT_IO
    assert cli.main(["bounds", "no-such-instance"]) == cli.EXIT_IO
    assert cli.main(["brute", "npb"]) == cli.EXIT_CAPACITY
    bad = tmp_path / "bad.txt"
    text = data.fixture_text("table8").replace("@c1", "c1", 1)
    bad.write_text(text)
    assert cli.main(["validate", str(bad), "--instance", "npb"]) == cli.EXIT_INFEASIBLE
    with pytest.raises(SystemExit):
        cli.main(["simulate", "--trials", "0"])


def test_fixtures_listing(capsys):
    assert cli.main(["fixtures", "list"]) == 0
    assert "npb" in capsys.readouterr().out
    assert cli.main(["fixtures", "dump", "unsat-example"]) == 0
    assert "p cnf" in capsys.readouterr().out
