import json

import pytest
from click.testing import CliRunner

from ybhom.cli import main, parse_range
from ybhom.intlinalg import read_sms


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return invoke


def strip_elapsed(text):
    out = []
    for line in text.splitlines():
        data = json.loads(line)
        data.pop("elapsed_ms", None)
        out.append(data)
    return out


def test_axioms(run, tmp_path):
    ok = run("axioms", "cyclic:4")
    assert ok.exit_code == 0 and "FAIL" not in ok.output
    ident = tmp_path / "identity.json"
    ident.write_text(json.dumps({"m": 2, "R1": [[0, 0], [1, 1]], "R2": [[0, 1], [0, 1]]}))
    res = run("axioms", str(ident), "--format", "json")
    data = json.loads(res.output)
    assert res.exit_code != 0
    assert data["verdicts"]["yang_baxter"] and not data["verdicts"]["diagonal"]
    bad = run("axioms", "alexander:4:2:3")
    assert bad.exit_code == 2 and "unit" in bad.output


def test_homology_examples(run):
    res = run("homology", "cyclic:2", "--n", "1..5", "--variant", "nyb", "--format", "json")
    groups = [(d["free_rank"], d["torsion"]) for d in strip_elapsed(res.output)]
    assert groups == [(1, [2]), (1, []), (1, [2]), (1, []), (1, [2])]
    res = run("homology", "cyclic:5", "--n", "3", "--variant", "d", "--format", "csv")
    assert res.output.splitlines()[1].endswith(",rank=9")
    res = run("homology", "cyclic:1", "--n", "1..4", "--variant", "yb", "--format", "json")
    assert [(d["free_rank"], d["torsion"]) for d in strip_elapsed(res.output)] == [(1, [])] * 4


def test_homology_csv_torsion_and_fields(run):
    res = run("homology", "cyclic:3", "--n", "3", "--variant", "yb", "--format", "csv")
    assert res.output.splitlines()[1].endswith(",rank=9;torsion=3")
    res = run("homology", "cyclic:3", "--n", "3", "--variant", "yb", "--coeff", "zp:3")
    assert "dim 10" in res.output
    res = run("homology", "cyclic:2", "--n", "2", "--variant", "yb", "--cohomology", "--format", "json")
    (data,) = strip_elapsed(res.output)
    assert (data["free_rank"], data["torsion"]) == (2, [2])


def test_homology_order_is_canonical(run):
    res = run("homology", "cyclic:3", "--n", "1..3", "--format", "json")
    keys = [(d["n"], d["variant"]) for d in strip_elapsed(res.output)]
    assert keys == [(n, v) for n in (1, 2, 3) for v in ("YB", "D", "NYB")]


def test_input_errors(run):
    assert run("homology", "cyclic:x").exit_code == 2
    assert run("homology", "cyclic:2", "--n", "3..1").exit_code == 2
    assert run("homology", "cyclic:2", "--variant", "abc").exit_code == 2
    assert run("homology", "cyclic:2", "--coeff", "zp:9").exit_code == 2
    assert run("homology", "missing.json").exit_code == 2
    assert run("verify", "betti", "alexander:4:3:3").exit_code == 2


def test_budget_refusal(run):
    res = run("homology", "cyclic:5", "--n", "8", "--budget-entries", "100000")
    assert res.exit_code == 3 and "budget" in res.output


def test_env_override(run):
    res = run("homology", "cyclic:2", "--n", "2", "--variant", "yb", env={"YBHOM_HOMOLOGY_FORMAT": "json"})
    assert json.loads(res.output)["free_rank"] == 2


def test_table_subset(run):
    res = run("table", "--subset", "C_3")
    assert res.exit_code == 0
    assert res.output.strip().splitlines()[-1] == "15/15 match"


def test_table_fault(run):
    res = run("table", "--subset", "C_2", "--inject-fault")
    assert res.exit_code == 1
    assert "DIFF" in res.output


def test_table_threads_deterministic(run):
    one = run("table", "--subset", "C_2", "--format", "json", "--threads", "1")
    two = run("table", "--subset", "C_2", "--format", "json", "--threads", "2")
    assert one.output == two.output and one.exit_code == 0


def test_verify_commands(run):
    res = run("verify", "torsion", "cyclic:3", "--n", "1..5")
    assert res.exit_code == 0
    assert all(json.loads(line)["passed"] for line in res.output.splitlines())
    res = run("verify", "conjecture", "cyclic:4", "--n", "1..5")
    assert res.exit_code == 0
    res = run("verify", "betti", "cyclic:5", "--n", "1..5")
    assert [json.loads(line)["computed"]["YB"] for line in res.output.splitlines()] == [1, 5, 25, 125, 625]
    res = run("verify", "splitting", "cyclic:2", "--n", "1..3")
    assert res.exit_code == 0
    assert run("verify", "equivariance", "alexander:4:3:3", "--n", "2").exit_code == 0
    assert run("verify", "property-i", "cyclic:3").exit_code == 0


def test_verify_equivariance_rejects_identity(run, tmp_path):
    ident = tmp_path / "identity.json"
    ident.write_text(json.dumps({"m": 2, "R1": [[0, 0], [1, 1]], "R2": [[0, 1], [0, 1]]}))
    assert run("verify", "property-i", str(ident)).exit_code == 1
    assert run("verify", "equivariance", str(ident), "--n", "1").exit_code == 2


def test_export(run, tmp_path):
    res = run("export", "cyclic:2", "--n", "2", "--export", str(tmp_path))
    assert res.exit_code == 0
    (path,) = tmp_path.glob("*.sms")
    M = read_sms(path)
    assert M.shape == (2, 4) and M.to_dense() == [[2, 0, 0, -2], [-2, 0, 0, 2]]
    res = run("export", "cyclic:5", "--n", "9", "--export", str(tmp_path), "--budget-entries", "100000")
    assert res.exit_code == 3


def test_homology_export(run, tmp_path):
    res = run("homology", "cyclic:2", "--n", "2", "--variant", "yb", "--export", str(tmp_path))
    assert res.exit_code == 0
    assert sorted(p.name for p in tmp_path.glob("*.sms")) == ["cyclic_2_YB_d2.sms", "cyclic_2_YB_d3.sms"]


def test_cocycles(run, tmp_path):
    res = run("cocycles", "3", "2", "--export", str(tmp_path))
    records = [json.loads(line) for line in res.output.splitlines()]
    assert len(records) == 3 and len(list(tmp_path.glob("*.json"))) == 3
    assert all(r["representative"][-1] == 0 for r in records)
    assert all((r["m"], r["n"], r["ring"]) == (3, 2, "Z") for r in records)


def test_parse_range():
    assert parse_range("1..5") == (1, 2, 3, 4, 5)
    assert parse_range("3") == (3,)
