import json

import pytest

from artifact import equivalence as eq
from artifact.cli import main, parse_rspec, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_gamma(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _ = run(capsys, "gamma", "--d", "5", "--json", str(out), "--quiet")
    assert code == 0
    assert json.loads(out.read_text())["clifford_relations"] == "pass"


@pytest.mark.parametrize("emit", ["z", "projectors", "permutation", "tower"])
def test_invariants(capsys, emit):
    code, cap = run(capsys, "invariants", "--d", "4", "--emit", emit)
    assert code == 0 and "ok" in cap.out


def test_rmatrix_json_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "rmatrix", "--d", "4", "--chirality", "minus", "--json", str(a))
    run(capsys, "--quiet", "rmatrix", "--d", "4", "--chirality", "minus", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_verify_pass_and_fail(capsys):
    assert run(capsys, "verify", "rrr", "--d", "4", "--chirality", "minus")[0] == 0
    assert run(capsys, "verify", "inversion", "--d", "4", "--beta", "0")[0] == 1
    assert run(capsys, "verify", "inversion", "--d", "4")[0] == 0


def test_usage_errors(capsys):
    assert run(capsys, "verify", "rrr", "--d", "9")[0] == 2
    assert run(capsys, "chain", "monodromy", "--d", "8", "--N", "3")[0] == 2
    assert run(capsys, "equiv", "intertwine", "--left", "so:3:ss")[0] == 2
    assert run(capsys, "suite", "--criteria", "12")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2


def test_rspec():
    assert parse_rspec("sl:2").rows == 4
    assert parse_rspec("sp:4:vv").rows == 16
    with pytest.raises(UsageError):
        parse_rspec("so:x:ss")


def test_equiv_modes(capsys):
    assert run(capsys, "equiv", "--left", "so:3:ss", "--right", "sl:2", "--reparam", "2,0")[0] == 0
    assert run(capsys, "equiv", "blocks", "--d", "4")[0] == 0
    assert run(capsys, "equiv", "rtt-pattern", "--d", "4", "--chirality", "plus")[0] == 0
    assert run(capsys, "equiv", "table", "--table", "so5")[0] == 0
    assert run(capsys, "equiv", "table", "--table", "so6_minus")[0] == 1


def test_chain(capsys):
    assert run(capsys, "chain", "commute", "--d", "3", "--N", "2")[0] == 0
    assert run(capsys, "chain", "fusion", "--N", "1")[0] == 0
    assert run(capsys, "chain", "fusion", "--N", "2", "--shift", "1")[0] == 1


def test_suite_subset_writes_outputs(capsys, tmp_path):
    code, cap = run(capsys, "suite", "--criteria", "1,5", "--output-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "criterion_01.json").exists() and (tmp_path / "summary.txt").exists()
    assert cap.out.count("[PASS]") == 2


def test_suite_corrupted_fixture_fails(capsys, tmp_path):
    tables = {name: eq.load_table(name) for name in eq.table_names()}
    tables["so4_minus"]["entries"][0]["value"] = [5, 1]
    fx = tmp_path / "bad.json"
    fx.write_text(json.dumps({"tables": tables}))
    code, cap = run(capsys, "suite", "--criteria", "6", "--tables", str(fx))
    assert code == 1 and "table so4_minus" in cap.out
    # the packaged fixture is untouched
    assert eq.load_table("so4_minus")["entries"][0]["value"] != [5, 1]
