import csv
import io
import json
from pathlib import Path

import pytest

import expost
from expost.cli import SWEEP_COLUMNS, main

DATA = Path(expost.__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_check(capsys):
    code, data = run_json(capsys, "check", DATA / "appendixB_4x4.json")
    assert code == 0
    assert data["rank_joint"] == 3 and data["convex_indep_a"] and not data["completeness_a"]


def test_global_flags_before_subcommand(capsys):
    code, data = run_json(capsys, "--rank-tol", "1e-3", "check", DATA / "example1.json")
    assert code == 0 and data["rank_tolerance"] == 1e-3


def test_solve_and_enumerate(capsys):
    code, data = run_json(capsys, "solve", DATA / "example1.json")
    assert code == 0 and data["value"] == pytest.approx(0.5)
    code, data = run_json(capsys, "enumerate", DATA / "example1.json")
    assert code == 0 and data["count"] == 4 and data["profiles_scanned"] == 16


def test_enumerate_cap(capsys):
    code, _, err = run(capsys, "enumerate", DATA / "appendixB_4x4.json", "--cap", "10")
    assert code == 2 and "cap" in err


def test_verify_exit_codes(capsys, tmp_path):
    code, data = run_json(capsys, "verify", DATA / "example1.json", DATA / "example1_strategy.json")
    assert code == 0 and data["is_bne"]["is_bne"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"A": {"pure": [0, 0]}, "B": {"pure": [0, 0]}}))
    code, _, _ = run(capsys, "verify", DATA / "example1.json", bad)
    assert code == 1


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "check", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(capsys, "check", broken)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"joint": [[0.5, 0.6]], "payoff_A": [[1]]}))
    assert run(capsys, "check", bad)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_welfare_csv(capsys):
    code, out, _ = run(capsys, "election", "welfare", "--n", "20000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["profile"] == "antipander" and rows[0]["rule"] == "coin"


def test_welfare_check_flag(capsys):
    code, data = run_json(capsys, "election", "welfare", "--profile", "fullpander", "--n", "20000", "--check")
    assert code == 0 and data["closed_form"] == -1.0


def test_sweep_columns(capsys):
    code, out, _ = run(capsys, "election", "sweep", "--n", "5000", "--alphas", "1,2",
                       "--format", "csv")
    assert code == 0
    reader = csv.DictReader(io.StringIO(out))
    assert tuple(reader.fieldnames) == SWEEP_COLUMNS
    assert len(list(reader)) == 6


def test_deviation(capsys):
    code, data = run_json(capsys, "election", "deviation", "--grid", "0:2:0.5", "--mc-n", "20000")
    assert code == 0 and data["strictly_increasing"]
    assert len(data["rows"]) == 5
    code, _, _ = run(capsys, "election", "deviation", "--grid", "bad")
    assert code == 2


def test_decompose_and_indifference(capsys):
    code, data = run_json(capsys, "election", "decompose", "--n", "50000")
    assert code == 0 and data["method"] == "closed-form"
    code, data = run_json(capsys, "election", "indifference", "--n-checks", "500", "--beta-b", "2")
    assert code == 0 and data["holds"]


def test_asymmetric_benevolent_rejected(capsys):
    code, _, err = run(capsys, "election", "welfare", "--profile", "benevolent", "--beta-b", "2", "--n", "100")
    assert code == 2 and "beta" in err


def test_beta_verify(capsys):
    code, data = run_json(capsys, "beta", "verify", "--alpha", "3/2", "--beta", "4")
    assert code == 0 and data["all_identities_hold"]
    assert data["midpoint"]["max_residual"] == 0
    code, data = run_json(capsys, "beta", "verify", "--alpha", "2", "--beta", "2")
    assert code == 0 and "skipped" in data["unbiased_outcomes"]


def test_dual_verify(capsys):
    code, data = run_json(capsys, "dual", "verify", DATA / "dual_counterexample.json",
                          DATA / "dual_counterexample_strategy.json")
    assert code == 0
    assert data["profiles"][0]["constancy"]["holds"]
    code, data = run_json(capsys, "dual", "verify", DATA / "dual_fullrank.json")
    assert code == 0 and all(p["constancy"]["holds"] for p in data["profiles"])


def test_fixtures_command(capsys):
    code, data = run_json(capsys, "fixtures", "--list")
    assert code == 0 and "example1-matching-pennies" in data
    code, data = run_json(capsys, "fixtures", "example1-matching-pennies")
    assert code == 0 and data["passed"]
    assert run(capsys, "fixtures", "nope")[0] == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "solve", DATA / "example1.json", "--out", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["value"] == pytest.approx(0.5)


def test_byte_identical_across_workers(capsys):
    outputs = {run(capsys, "election", "welfare", "--n", "140000", "--workers", w)[1] for w in ("1", "3")}
    assert len(outputs) == 1
