"""Command-line behavior: formats, exit codes, determinism of outputs."""

import json

import pytest

from wernerdistill import bounds, cli, protocol


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExact:
    def test_table(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--w", "0.4")
        assert code == 0
        assert "p00                      0.34" in out
        assert "success_probability      0.68" in out
        assert "fidelity                 0.7" in out

    def test_json_full_precision(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--w", "0.3", "--x", "0.2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        cfg = protocol.NoisePairConfig(0.3, 0.2)
        assert payload["p00"] == protocol.outcome_distribution(cfg).p00
        assert payload["fidelity"] == protocol.fidelity_from_w(0.3)
        # post-selected fidelity from the dense engine rides along for noisy rounds
        assert 0.25 <= payload["post_selection_fidelity"] <= 1.0

    def test_perfect_input_is_fixed_point(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--w", "0", "--format", "json")
        payload = json.loads(out)
        assert payload["fidelity"] == 1.0
        assert payload["fidelity_after"] == 1.0

    def test_csv(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--w", "0.4", "--format", "csv")
        lines = out.strip().split("\n")
        assert len(lines) == 2
        assert lines[0].startswith("w,x,p00,")

    def test_domain_error_names_flag(self, capsys):
        code, _, err = run_cli(capsys, "exact", "--w", "1.5")
        assert code == 3
        assert "--w" in err

    def test_parse_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["exact", "--w", "abc"])
        assert exc.value.code == 2


class TestBounds:
    def test_single_point(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "0.1", "--delta", "0.01", "--w", "0")
        assert code == 0
        assert "1175" in out
        assert "4239" in out

    def test_near_vacuous_weight_flagged(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "0.2", "--w", "0.95")
        assert code == 0
        assert "unreachable" in out

    def test_csv_matches_library(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "0.1", "--w-grid", "0", "0.2", "0.1",
                               "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == bounds.FIGURE1_CSV_HEADER
        assert len(lines) == 4
        n = bounds.min_samples(bounds.METHOD_DISTILL, 0.1, 0.01, w=0.1)
        assert lines[2].split(",")[1] == str(n)

    def test_attenuation_from_idle_times(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "0.1", "--w", "0", "--t", "0.2",
                               "--T", "1.0", "--format", "json")
        payload = json.loads(out)
        import math
        assert payload["S"] == pytest.approx(math.exp(-0.2), abs=1e-15)

    def test_s_and_idle_conflict(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--eps", "0.1", "--S", "0.9", "--t", "0.2",
                               "--T", "1.0")
        assert code == 3
        assert "--S" in err


class TestFigure1:
    def test_default_csv(self, capsys):
        code, out, _ = run_cli(capsys, "figure1")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == bounds.FIGURE1_CSV_HEADER
        assert len(lines) == 97
        tomo_column = {line.split(",")[2] for line in lines[1:]}
        assert tomo_column == {"4239"}

    def test_out_file_and_rerun_identical(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert cli.main(["figure1", "--out", str(a)]) == 0
        assert cli.main(["figure1", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "fig.json"
        assert cli.main(["figure1", "--format", "json", "--out", str(path)]) == 0
        curves = bounds.figure1_from_json(path.read_text())
        assert bounds.figure1_to_json(curves) == path.read_text()

    def test_unwritable_path_exits_4(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "figure1", "--out", str(tmp_path / "missing" / "f.csv"))
        assert code == 4
        assert err.startswith("error:")

    def test_grid_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "figure1", "--w-grid", "0", "1.0", "0.1")
        assert code == 3
        assert "--w-grid" in err


class TestRun:
    def test_single_json(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--w", "0.3", "--N", "1000", "--eps-w", "0.05",
                               "--seed", "7")
        assert code == 0
        payload = json.loads(out)
        assert payload["N"] == 1000
        assert payload["seed"] == 7
        assert sum(payload["counts"].values()) == 1000

    def test_single_rerun_byte_identical(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        argv = ["run", "--w", "0.3", "--N", "2000", "--eps-w", "0.05", "--seed", "11"]
        assert cli.main(argv + ["--out", str(a)]) == 0
        assert cli.main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_reps_csv_and_summary(self, tmp_path, capsys):
        path = tmp_path / "reps.csv"
        code, out, _ = run_cli(capsys, "run", "--w", "0.2", "--N", "500", "--eps-w", "0.05",
                               "--reps", "10", "--seed", "3", "--out", str(path))
        assert code == 0
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "rep,seed,w_hat,fail"
        assert len(lines) == 11
        assert "failure_rate" in out

    def test_worker_count_keeps_bytes(self, tmp_path):
        argv = ["run", "--w", "0.2", "--N", "500", "--eps-w", "0.05", "--reps", "16",
                "--seed", "3"]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert cli.main(argv + ["--workers", "1", "--out", str(a)]) == 0
        assert cli.main(argv + ["--workers", "4", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_noise_flag_conflict(self, capsys):
        code, _, err = run_cli(capsys, "run", "--w", "0.2", "--N", "100", "--eps-w", "0.05",
                               "--x", "0.1", "--t", "0.2", "--T", "1.0")
        assert code == 3
        assert "--x" in err

    def test_idle_time_requires_constant(self, capsys):
        code, _, err = run_cli(capsys, "run", "--w", "0.2", "--N", "100", "--eps-w", "0.05",
                               "--t", "0.2")
        assert code == 3
        assert "--t" in err

    def test_realized_s_reported(self, capsys):
        import math

        code, out, _ = run_cli(capsys, "run", "--w", "0.3", "--N", "1000", "--eps-w", "0.05",
                               "--t", "0.2", "--T", "1.0", "--seed", "7")
        payload = json.loads(out)
        assert abs(payload["realized_S"] - math.exp(-0.2)) < 1e-12


class TestValidateCommand:
    def test_passes(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "--grid-step", "0.25")
        assert code == 0
        assert "[PASS] dense-oracle-outcomes" in out
        assert "0 failed" in out

    def test_perturbed_check_fails_and_names_itself(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "--grid-step", "0.25",
                               "--perturb", "distill-roundtrip")
        assert code == 5
        assert "[FAIL] distill-roundtrip" in out
        assert out.count("[FAIL]") == 1

    def test_unknown_check_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "validate", "--perturb", "not-a-check")
        assert code == 3
        assert "--perturb" in err
