import json
import math

import pytest

from eosim.cli import main, parse_angle

# fast, physically boring settings for CLI plumbing tests
FAST = ["--delta", "10", "--dt", "0.002", "--t-max", "2", "--lambda", "0"]


def run_cli(argv):
    return main(argv)


class TestParseAngle:
    def test_tokens(self):
        assert parse_angle("pi") == math.pi
        assert parse_angle("pi/2") == math.pi / 2
        assert parse_angle("1.25") == 1.25

    def test_rejects_garbage(self):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_angle("tau")


class TestRun:
    def test_writes_summary_json(self, tmp_path, capsys):
        code = run_cli(["run", *FAST, "--output-dir", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["delta"] == 10.0
        assert summary["input_kind"] == "single_photon"
        assert 0.0 <= summary["p_total"] <= 1.0
        out = capsys.readouterr().out
        assert "F_average = " in out
        assert "P_total = " in out

    def test_trajectory_csv(self, tmp_path):
        code = run_cli(["run", *FAST, "--output-dir", str(tmp_path), "--trajectory"])
        assert code == 0
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,pc,fidelity,trace"
        assert len(lines) == 1002  # header + 1001 samples
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[3]) == pytest.approx(1.0)

    def test_plot_renders_png(self, tmp_path):
        code = run_cli(["run", *FAST, "--output-dir", str(tmp_path), "--plot"])
        assert code == 0
        data = (tmp_path / "trajectory.png").read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\n"
            "delta = 10\n"
            "lambda_deph = 0\n"
            "dt = 0.002\n"
            "t_max = 2\n"
            "output_dir = {0}\n".format(tmp_path / "a")
        )
        assert run_cli(["run", "--config", str(cfg)]) == 0
        a = json.loads((tmp_path / "a" / "summary.json").read_text())
        assert a["delta"] == 10.0

        # the flag overrides the file
        assert run_cli([
            "run", "--config", str(cfg), "--delta", "12",
            "--output-dir", str(tmp_path / "b"),
        ]) == 0
        b = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert b["delta"] == 12.0

    def test_summary_json_round_trip(self, tmp_path):
        assert run_cli(["run", *FAST, "--output-dir", str(tmp_path / "x")]) == 0
        first = json.loads((tmp_path / "x" / "summary.json").read_text())
        # a summary is itself a valid config reproducing the run
        assert run_cli([
            "run", "--config", str(tmp_path / "x" / "summary.json"),
            "--output-dir", str(tmp_path / "y"),
        ]) == 0
        second = json.loads((tmp_path / "y" / "summary.json").read_text())
        assert second == first

    def test_invalid_config_exits_2(self, tmp_path, capsys):
        code = run_cli(["run", *FAST, "--gamma", "-1", "--output-dir", str(tmp_path)])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file_exits_2(self, tmp_path):
        assert run_cli(["run", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_coherent_truncation_violation_exits_2(self, tmp_path):
        code = run_cli([
            "run", *FAST, "--input", "coherent", "--alpha", "0.2",
            "--n-max", "1", "--output-dir", str(tmp_path),
        ])
        assert code == 2


class TestSweep:
    SPEC = "deltas = 10\ngamma_norms = 0.5 1.5\nlambda_deph = 0\ndt = 0.01\n"

    def test_csv_output_and_exit_code(self, tmp_path):
        spec = tmp_path / "sweep.cfg"
        spec.write_text(self.SPEC)
        out = tmp_path / "scan.csv"
        code = run_cli(["sweep", str(spec), "--output", str(out), "--workers", "1"])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delta,gamma_norm,f_average,p_total,status"
        assert len(lines) == 3
        assert all(line.endswith(",ok") for line in lines[1:])

    def test_rerun_is_bit_identical(self, tmp_path):
        spec = tmp_path / "sweep.cfg"
        spec.write_text(self.SPEC)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(["sweep", str(spec), "--output", str(a), "--workers", "1"]) == 0
        assert run_cli(["sweep", str(spec), "--output", str(b), "--workers", "1"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_empty_grid_exits_2(self, tmp_path, capsys):
        spec = tmp_path / "sweep.cfg"
        spec.write_text("deltas =\ngamma_norms = 1.0\n")
        assert run_cli(["sweep", str(spec), "--output", str(tmp_path / "o.csv")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_failed_rows_reported_on_stderr(self, tmp_path, capsys):
        spec = tmp_path / "sweep.cfg"
        spec.write_text(
            "deltas = 10\ngamma_norms = 1.0\ndt = 0.05\n"
            "input_kind = coherent\nalpha = 0.2\nn_max = 1\n"
        )
        out = tmp_path / "o.csv"
        code = run_cli(["sweep", str(spec), "--output", str(out), "--workers", "1"])
        assert code == 0  # per-row failures do not abort the sweep
        assert "error" in capsys.readouterr().err
        assert "error" in out.read_text()

    def test_plot(self, tmp_path):
        spec = tmp_path / "sweep.cfg"
        spec.write_text(self.SPEC)
        out = tmp_path / "scan.csv"
        code = run_cli([
            "sweep", str(spec), "--output", str(out), "--workers", "1", "--plot",
        ])
        assert code == 0
        assert (tmp_path / "scan.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestIdeal:
    def test_phase(self, capsys):
        assert run_cli(["ideal", "phase", "--delta", "20", "--t", "10"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(0.5)

    def test_success_with_pi_token(self, capsys):
        assert run_cli(["ideal", "success", "--theta", "pi"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(0.5)

    def test_coherent(self, capsys):
        assert run_cli(["ideal", "coherent", "--alpha", "0.2", "--theta", "pi"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("F=")
        assert " P=" in out

    def test_source_bound(self, capsys):
        # vacuum emission only reduces the success rate, not heralded fidelity,
        # so the floor subtracts multiphoton terms only
        assert run_cli([
            "ideal", "source-bound", "--p", "0:0.14", "--p", "2:0.0008",
        ]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(1 - 0.0008)

    def test_bad_source_term_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["ideal", "source-bound", "--p", "zero"])
        assert exc.value.code == 2
