"""End-to-end tests for the dctflow command line interface."""

import json

import pytest

from conftest import GOLDEN_TABLE2
from dctflow.cli import main
from dctflow.factorizer import dense_base_plan
from dctflow.flowgraph import save_plan


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_count_scaled_folded(capsys):
    code, out, _ = run(capsys, "count", "--n", "6", "--scaled", "--fold")
    assert code == 0
    assert out.strip() == "1,16,2"


def test_count_csv_header(capsys):
    code, out, _ = run(capsys, "count", "--n", "8", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["mu,alpha,sigma", "12,29,3"]


def test_count_compare_agrees(capsys):
    code, out, _ = run(capsys, "count", "--n", "12", "--scaled", "--fold", "--compare")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("plan:")
    assert lines[1].startswith("formula:")
    assert lines[2] == "diff: 0,0,0"


def test_count_by_factors(capsys):
    code, out, _ = run(capsys, "count", "--q", "3", "--m", "1")
    assert code == 0
    assert out.strip() == "5,16,3"


def test_formula_scaled(capsys):
    code, out, _ = run(capsys, "formula", "--q", "15", "--m", "3", "--scaled")
    assert code == 0
    assert out.strip() == "183,1090,43"


def test_formula_pfa_scaled(capsys):
    code, out, _ = run(capsys, "formula", "--q", "5", "--m", "4", "--pfa-scaled")
    assert code == 0
    assert out.strip() == "142"


def test_formula_savings(capsys):
    code, out, _ = run(capsys, "formula", "--q", "3", "--m", "1", "--savings")
    assert code == 0
    assert out.strip() == "4"


def test_formula_pfa_lower(capsys):
    code, out, _ = run(capsys, "formula", "--q", "3", "--m", "3", "--pfa-lower")
    assert code == 0
    assert out.strip() == "41"


def test_formula_unknown_base(capsys):
    code, out, err = run(capsys, "formula", "--q", "7", "--m", "1")
    assert code == 2
    assert "registry" in err


def test_formula_compare_rejects_bounds(capsys):
    code, _, err = run(capsys, "formula", "--q", "3", "--m", "2", "--savings", "--compare")
    assert code == 2
    assert "compare" in err


def test_gen_rejects_bad_length(capsys):
    code, _, err = run(capsys, "gen", "--n", "0")
    assert code == 2
    assert "positive" in err


def test_gen_json_document(capsys):
    code, out, _ = run(capsys, "gen", "--n", "8", "--fold")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "dct2"
    assert doc["folded"] is True
    assert doc["counts"] == {"mu": 12, "alpha": 29, "sigma": 3}
    assert doc["plan"]["n_inputs"] == 8


def test_gen_scaled_json_includes_reconstruction(capsys):
    code, out, _ = run(capsys, "gen", "--n", "8", "--scaled", "--fold")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "scaled-dct2"
    assert doc["counts"] == {"mu": 5, "alpha": 29, "sigma": 0}
    assert len(doc["pi"]) == 8
    assert len(doc["delta"]) == 8


def test_gen_dot_output(capsys):
    code, out, _ = run(capsys, "gen", "--n", "6", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph")
    assert out.count('label="in') == 6
    assert out.count('label="out') == 6


def test_gen_merged_outside_family(capsys):
    code, _, err = run(capsys, "gen", "--n", "10", "--scaled", "--variant", "merged")
    assert code == 1
    assert "families" in err


def test_eval_reports_prng_and_passes(capsys):
    code, out, _ = run(capsys, "eval", "--n", "12", "--scaled", "--fold")
    assert code == 0
    assert "PRNG: PCG64 seed=0" in out
    code2, out2, _ = run(capsys, "eval", "--n", "12", "--scaled", "--fold")
    assert out2 == out


def test_eval_bad_tolerance(capsys):
    code, _, err = run(capsys, "eval", "--n", "8", "--tol", "0.5")
    assert code == 2
    assert "tolerance" in err


def test_verify_small_sweep(capsys):
    code, out, err = run(capsys, "verify", "--max-n", "16")
    assert code == 0
    assert "all identities within tolerance" in out
    assert "Eq" not in out
    for identity in ("dct4-via-dct2", "dct2-split", "kok-plan-oracle", "merged-scaled-oracle"):
        assert identity in out


def test_verify_rejects_corrupt_base_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "verify", "--max-n", "8", "--base-plan", f"5={path}")
    assert code == 1
    assert "bad.json" in err


def test_verify_accepts_registered_base(tmp_path, capsys):
    path = tmp_path / "base7.json"
    save_plan(dense_base_plan(7), path)
    code, out, _ = run(capsys, "verify", "--max-n", "14", "--base-plan", f"7={path}")
    assert code == 0
    assert "all identities within tolerance" in out


def test_verify_malformed_registration(capsys):
    code, _, err = run(capsys, "verify", "--base-plan", "5")
    assert code == 2
    assert "Q=PATH" in err


def test_table2_stdout(capsys):
    code, out, _ = run(capsys, "table2")
    assert code == 0
    assert out == GOLDEN_TABLE2
    assert "3,4,48,66,337,16,63" in out.splitlines()


def test_fig5_rows(capsys):
    code, out, _ = run(capsys, "fig5", "--max-m", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "family,N,mu_norm"
    assert len(lines) == 1 + 3 + 4 + 4 + 4
    assert "2^m,8,0.625" in lines


def test_usage_errors_exit_2(capsys):
    assert run(capsys, )[0] == 2
    assert run(capsys, "count")[0] == 2
    assert run(capsys, "count", "--n", "8", "--wat")[0] == 2
    assert run(capsys, "nope")[0] == 2
