"""Command-line surface: output schemas, round-trips, exit codes."""

import json

import numpy as np
import pytest

from twodesign import save_density, validate_density
from twodesign.cli import bound_record_from_obj, bound_record_to_obj, main
from twodesign.bounds import OptimizerOptions, compute_bound_record
from twodesign.designs import sic_povm


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDesignsCommand:
    def test_show_mub_json(self, capsys):
        code, out, _ = run_cli(capsys, "designs", "show", "--design", "mub", "--d", "3")
        assert code == 0
        payload = json.loads(out)
        assert payload["kind"] == "mub" and len(payload["bases"]) == 4
        # round-trip stability of the serialized output
        assert json.loads(json.dumps(payload)) == payload

    def test_verify_sic_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "designs", "verify", "--design", "sic", "--d", "4", "--tol", "1e-9"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert payload["max_deviation"] < 1e-9
        assert payload["tolerance"] == 1e-9

    def test_family_triple(self, capsys):
        code, out, _ = run_cli(
            capsys, "designs", "verify", "--design", "mub", "--d", "4",
            "--x", "1.0", "--y", "0.5", "--z", "2.0",
        )
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_unsupported_dimension_is_error(self, capsys):
        code, _, err = run_cli(capsys, "designs", "show", "--design", "mub", "--d", "7")
        assert code == 1
        assert "UnsupportedDimension" in json.loads(err)["error"]


class TestCorrelateCommand:
    def test_correlate_state_file(self, capsys, tmp_path):
        path = tmp_path / "mixed.json"
        save_density(path, validate_density(np.eye(9) / 9, 3))
        code, out, _ = run_cli(
            capsys, "correlate", "--state", str(path),
            "--design", "mub", "--d", "3", "--m", "2",
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["value"] - 2 / 3) < 1e-6
        assert payload["design_descriptor"]["kind"] == "mub"

    def test_correlate_with_subset_and_kind_alias(self, capsys, tmp_path):
        path = tmp_path / "mixed.json"
        save_density(path, validate_density(np.eye(9) / 9, 3))
        code, out, _ = run_cli(
            capsys, "correlate", "--state", str(path),
            "--design", "sic", "--d", "3", "--subset", "1,2,4",
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["value"] - 3 / 9) < 1e-6
        assert payload["design_descriptor"]["size"] == 3
        code, out, _ = run_cli(capsys, "designs", "verify", "--kind", "mub", "--d", "2")
        assert code == 0 and json.loads(out)["pass"] is True

    def test_malformed_json_reports_location(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"local_dim": 2, "matrix": [[[1, 0movie]]]}')
        code, _, err = run_cli(
            capsys, "correlate", "--state", str(path), "--design", "mub", "--d", "2"
        )
        assert code == 1
        msg = json.loads(err)
        assert msg["error"] == "ParseError"
        assert "line 1" in msg["message"] and "column" in msg["message"]


class TestBoundsCommand:
    def test_single_design_record(self, capsys):
        code, out, _ = run_cli(
            capsys, "bounds", "--design", "sic", "--d", "2", "--m", "3", "--seed", "1"
        )
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["lower"] - 4 / 15) < 1e-4
        assert abs(payload["upper"] - 4 / 3) < 1e-4
        rec = bound_record_from_obj(payload)
        assert rec.size == 3

    def test_all_subsets_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "bounds", "--design", "sic", "--d", "2", "--m", "2",
            "--all-subsets", "--format", "csv", "--restarts", "16",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "subset,lower,upper,converged"
        assert len(lines) == 7  # header + C(4,2) subsets

    def test_record_round_trip(self):
        rec = compute_bound_record(sic_povm(2).subset(range(3)), OptimizerOptions(seed=0))
        again = bound_record_from_obj(json.loads(json.dumps(bound_record_to_obj(rec))))
        assert again.lower == rec.lower and again.upper == rec.upper
        np.testing.assert_allclose(again.argmin.e, rec.argmin.e, atol=0)

    def test_family_scan_grid_validation(self, capsys):
        code, _, err = run_cli(
            capsys, "bounds", "--design", "mub", "--d", "4",
            "--family-scan", "--grid-steps", "8",
        )
        assert code == 1
        assert "grid steps" in json.loads(err)["message"]


class TestDetectCommand:
    def test_werner_preset(self, capsys):
        code, out, _ = run_cli(
            capsys, "detect", "--state", "werner", "--param", "0.2",
            "--design", "mub", "--d", "3",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "EntangledByLower"
        assert abs(payload["value"] - 0.4) < 1e-6
        assert payload["conjugate_second"] is False

    def test_isotropic_preset_sets_conjugation(self, capsys):
        code, out, _ = run_cli(
            capsys, "detect", "--state", "isotropic", "--param", "0.9",
            "--design", "sic", "--d", "3", "--bounds", "closed-form",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["conjugate_second"] is True
        assert payload["verdict"] == "EntangledByUpper"

    def test_state_file_inconclusive(self, capsys, tmp_path):
        path = tmp_path / "mixed.json"
        save_density(path, validate_density(np.eye(4) / 4, 2))
        code, out, _ = run_cli(
            capsys, "detect", "--state-file", str(path),
            "--design", "mub", "--d", "2", "--bounds", "closed-form",
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "Inconclusive"

    def test_closed_form_requires_full_design(self, capsys):
        code, _, err = run_cli(
            capsys, "detect", "--state", "werner", "--param", "0.2",
            "--design", "mub", "--d", "3", "--m", "2", "--bounds", "closed-form",
        )
        assert code == 1
        assert "full design" in json.loads(err)["message"]

    def test_cached_bounds(self, capsys, tmp_path):
        rec = compute_bound_record(sic_povm(2), OptimizerOptions(seed=0))
        path = tmp_path / "bounds.json"
        path.write_text(json.dumps(bound_record_to_obj(rec)))
        code, out, _ = run_cli(
            capsys, "detect", "--state", "werner", "--param", "0.1",
            "--design", "sic", "--d", "2", "--bounds", "cached",
            "--bounds-file", str(path),
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "EntangledByLower"


class TestScanCommand:
    def test_werner_csv_flip(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--family", "werner", "--d", "2",
            "--design", "mub", "--d", "2", "--bounds", "closed-form",
            "--start", "0.4", "--stop", "0.6", "--step", "0.01", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "parameter,value,verdict"
        verdicts = [line.split(",")[2] for line in lines[1:]]
        assert verdicts[0] == "EntangledByLower" and verdicts[-1] == "Inconclusive"

    def test_isotropic_json_first_flip(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--family", "isotropic", "--d", "2",
            "--design", "mub", "--d", "2", "--bounds", "closed-form",
            "--start", "0.2", "--stop", "0.5", "--step", "0.01",
        )
        assert code == 0
        payload = json.loads(out)
        flip = payload["first_flip"]
        assert flip is not None
        assert abs(flip[0] - 1 / 3) < 0.02
        assert flip[2] == "EntangledByUpper"

    def test_werner_best_six_subset_flip(self, capsys):
        # the strongest 6-vector subset of the d=3 SIC detects Werner states
        # down to p just above 0.11
        code, out, _ = run_cli(
            capsys, "scan", "--family", "werner", "--d", "3",
            "--design", "sic", "--d", "3", "--subset", "1,2,3,4,5,7",
            "--start", "0.0", "--stop", "0.3", "--step", "1e-3",
        )
        assert code == 0
        flip = json.loads(out)["first_flip"]
        assert flip[1] == "EntangledByLower" and flip[2] == "Inconclusive"
        assert abs(flip[0] - 0.11) < 1e-2

    def test_isotropic_full_sic_flip(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", "--family", "isotropic", "--d", "3",
            "--design", "sic", "--d", "3", "--bounds", "closed-form",
            "--start", "0.1", "--stop", "0.4", "--step", "1e-3",
        )
        assert code == 0
        flip = json.loads(out)["first_flip"]
        assert flip[2] == "EntangledByUpper"
        assert abs(flip[0] - 0.25) < 1e-2


class TestTablesCommand:
    def test_eq12_passes(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--id", "EQ12")
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert len(payload["rows"]) == 8

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--id", "EQ12", "--format", "csv")
        assert code == 0
        head = out.strip().splitlines()[0]
        assert head == "cell,computed,reference,abs_error,tolerance,pass"

    def test_deterministic_under_fixed_seed(self, capsys):
        _, first, _ = run_cli(capsys, "tables", "--id", "EQ12", "--seed", "3")
        _, second, _ = run_cli(capsys, "tables", "--id", "EQ12", "--seed", "3")
        assert first == second

    def test_table_iii_end_to_end(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--id", "III")
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert len(payload["rows"]) == 6

    def test_unknown_table_is_usage_error(self, capsys):
        with pytest.raises(SystemExit):
            main(["tables", "--id", "VII"])
