import json
import math

import numpy as np
import pytest

from sepkit.cli import EXIT_ASSERTION, EXIT_OK, EXIT_USAGE, dispatch
from sepkit.geometry import read_binary, read_csv


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_ball_remark_point(capsys):
    code, out, err = run_cli(capsys, "bounds", "ball", "--n", "100",
                             "--r", "0.70710678", "--m", "2700000")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["probability_lower_bound"] >= 0.99
    assert "sepkit config:" in err  # reproducibility echo before results


def test_inv_sqrt2_token(capsys):
    code, out, _ = run_cli(capsys, "bounds", "ball", "--n", "100",
                           "--r", "inv-sqrt2", "--m", "1", "--kind", "single")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["log_complement"] == pytest.approx(-50 * math.log(2), rel=1e-14)


def test_bounds_cube_rejects_out_of_range_delta(capsys):
    code, _, err = run_cli(capsys, "bounds", "cube", "--n", "10", "--m", "5",
                           "--delta", "0.9", "--sigma0sq", "0.1")
    assert code == EXIT_USAGE
    assert "delta" in err


def test_unknown_flag_exits_two(capsys):
    code, _, _ = run_cli(capsys, "bounds", "ball", "--n", "10", "--m", "5",
                         "--r", "0.5", "--frobnicate")
    assert code == EXIT_USAGE


def test_bounds_cascade(capsys):
    code, out, _ = run_cli(capsys, "bounds", "cascade", "--n", "100",
                           "--r", "inv-sqrt2", "--m", "2740000")
    assert code == EXIT_OK
    assert json.loads(out)["complement"] < 5e-14


def test_bounds_max_m(capsys):
    code, out, _ = run_cli(capsys, "bounds", "max-m", "--family", "ball-simple",
                           "--n", "100", "--r", "inv-sqrt2", "--theta", "0.01")
    assert code == EXIT_OK
    assert json.loads(out)["max_m_floor"] == 2_739_707


def test_sample_csv_and_binary_round_trip(tmp_path, capsys):
    csv_path = tmp_path / "pts.csv"
    bin_path = tmp_path / "pts.bin"
    code, _, _ = run_cli(capsys, "sample", "--dist", "cube", "--n", "4", "--m", "9",
                         "--seed", "5", "--out", str(csv_path))
    assert code == EXIT_OK
    code, _, _ = run_cli(capsys, "sample", "--dist", "cube", "--n", "4", "--m", "9",
                         "--seed", "5", "--format", "binary", "--out", str(bin_path))
    assert code == EXIT_OK
    a, b = read_csv(csv_path), read_binary(bin_path)
    # csv keeps 17 significant digits: exact round trip of doubles
    assert np.array_equal(a, b)


def test_sample_product_via_pattern(tmp_path, capsys):
    out = tmp_path / "prod.csv"
    code, _, _ = run_cli(capsys, "sample", "--dist", "product", "--n", "6", "--m", "40",
                         "--seed", "2", "--sigma0sq", "0.05",
                         "--product-gens", "u(0,1)x3;b(0.3)x3", "--out", str(out))
    assert code == EXIT_OK
    pts = read_csv(out)
    assert pts.shape == (40, 6)
    assert set(np.unique(pts[:, 3:])) <= {0.0, 1.0}


def test_product_without_generators_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "sample", "--dist", "product", "--n", "3", "--m", "5")
    assert code == EXIT_USAGE
    assert "product" in err


def test_check_point(capsys):
    code, out, _ = run_cli(capsys, "check", "point", "--dist", "ball", "--n", "30",
                           "--m", "50", "--seed", "4", "--probe-index", "7")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["check"] == "fisher"
    assert isinstance(doc["separable"], bool)


def test_check_pairs_csv(capsys):
    code, out, _ = run_cli(capsys, "check", "pairs", "--dist", "ball", "--n", "40",
                           "--m", "20", "--seed", "4", "--r", "0.6", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "index,separable,margin,violator_count"
    assert len(out.splitlines()) == 21


def test_check_oracle(capsys):
    code, out, _ = run_cli(capsys, "check", "oracle", "--dist", "ball", "--n", "5",
                           "--m", "30", "--seed", "6", "--probe-index", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["check"] == "oracle"


def test_check_cascade(capsys):
    code, out, _ = run_cli(capsys, "check", "cascade", "--dist", "ball", "--n", "50",
                           "--m", "200", "--seed", "8", "--probe-index", "199",
                           "--r", "0.5")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc) == {"check", "probe_index", "violators", "first", "second"}


def test_check_kind_validation(capsys):
    code, _, err = run_cli(capsys, "check", "point", "--dist", "ball", "--n", "5",
                           "--m", "10", "--kind", "angle")
    assert code == EXIT_USAGE
    assert "kind" in err


def test_correct_build_and_audit(capsys):
    code, out, _ = run_cli(capsys, "correct", "build", "--dist", "ball",
                           "--n", "40", "--m", "500", "--seed", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc) == {"n", "weights", "offset", "whitening", "corrected_label"}
    code, out, _ = run_cli(capsys, "correct", "audit", "--dist", "ball",
                           "--n", "40", "--m", "500", "--seed", "3")
    assert code == EXIT_OK
    audit = json.loads(out)
    assert audit["true_positive"] is True
    assert 0.0 <= audit["false_positive_rate"] <= 1.0


def test_experiment_remark1(capsys):
    code, out, _ = run_cli(capsys, "experiment", "remark1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["max_m_floor"] == 2_739_707


def test_experiment_cascade(capsys):
    code, out, _ = run_cli(capsys, "experiment", "cascade")
    assert code == EXIT_OK
    assert json.loads(out)["pass"] is True


def test_experiment_fig2_small(tmp_path, capsys):
    out_path = tmp_path / "fig2.csv"
    code, _, _ = run_cli(capsys, "experiment", "fig2", "--dims", "8,16", "--m", "40",
                         "--n-probe", "10", "--trials", "3", "--seed", "2",
                         "--format", "csv", "--out", str(out_path))
    assert code == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed"
    assert len(lines) == 3


def test_experiment_validate_small(capsys, monkeypatch):
    import sepkit.experiments as exp
    monkeypatch.setattr(exp, "DEFAULT_GRID", (exp.ValidationCell("ball", 15, 50, 0.8),))
    code, out, _ = run_cli(capsys, "experiment", "validate", "--trials", "30")
    assert code == EXIT_OK
    assert json.loads(out)["pass"] is True


def test_experiment_failure_maps_to_exit_three(capsys, monkeypatch):
    import sepkit.cli as cli
    import sepkit.experiments as exp

    class FakeReport:
        passed = False

        def to_json(self):
            return "{\"pass\": false}\n"

    monkeypatch.setattr(exp, "run_remark1", lambda: FakeReport())
    code, _, _ = run_cli(capsys, "experiment", "remark1")
    assert code == EXIT_ASSERTION


def test_unwritable_output_is_internal_error(capsys):
    code, _, err = run_cli(capsys, "bounds", "ball", "--n", "10", "--m", "5",
                           "--r", "0.5", "--out", "/nonexistent-dir/x.json")
    assert code == 1
    assert "i/o error" in err


def test_json_csv_numeric_round_trip(tmp_path, capsys):
    # the same report emitted as csv and json carries identical numbers
    csv_path, json_path = tmp_path / "v.csv", tmp_path / "v.json"
    args = ["experiment", "fig2", "--dims", "12", "--m", "50", "--n-probe", "20",
            "--trials", "4", "--seed", "11"]
    assert dispatch(args + ["--format", "csv", "--out", str(csv_path)]) == EXIT_OK
    assert dispatch(args + ["--format", "json", "--out", str(json_path)]) == EXIT_OK
    capsys.readouterr()
    row = csv_path.read_text().splitlines()[1].split(",")
    doc = json.loads(json_path.read_text())["rows"][0]
    assert float(row[4]) == doc["mean_freq"]
    assert float(row[7]) == doc["bound_eq12"]


def test_no_subcommand_is_usage_error(capsys):
    assert dispatch([]) == EXIT_USAGE
    capsys.readouterr()
