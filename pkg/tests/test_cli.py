import json
from pathlib import Path

import numpy as np
import pytest

from resbvp import cli

from conftest import PROBLEMS_DIR


def run(argv):
    return cli.main([str(a) for a in argv])


def problem(name) -> str:
    return str(PROBLEMS_DIR / name)


class TestSolveLinear:
    def test_resonant_family_exit_zero(self, tmp_path, capsys):
        code = run(["solve-linear", problem("identity_resonant.json"), "-o", tmp_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "classification: family" in out
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["solvability"]["classification"] == "family"
        assert doc["solvability"]["kernel_dim"] == 2
        assert (tmp_path / "particular.csv").exists()
        assert (tmp_path / "kernel_01.csv").exists()
        assert (tmp_path / "kernel_02.csv").exists()

    def test_classical_fibonacci(self, tmp_path, capsys):
        code = run(["solve-linear", problem("fibonacci_periodic.json"), "-o", tmp_path])
        assert code == 0
        assert "unique_classical" in capsys.readouterr().out

    def test_quasisolution_exit_two(self, tmp_path, capsys):
        code = run(["solve-linear", problem("quasisolution_multipoint.json"),
                    "-o", tmp_path])
        assert code == 2
        assert "quasisolution" in capsys.readouterr().err

    def test_allow_quasi_downgrades_to_zero(self, tmp_path):
        code = run(["solve-linear", problem("quasisolution_multipoint.json"),
                    "-o", tmp_path, "--allow-quasi"])
        assert code == 0

    def test_emitted_residuals_are_small(self, tmp_path):
        run(["solve-linear", problem("rotation_lv.json"), "-o", tmp_path])
        doc = json.loads((tmp_path / "report.json").read_text())
        for entry in doc["trajectories"].values():
            assert entry["recurrence_residual"] <= 1e-10
            assert entry["boundary_residual"] <= 1e-10


class TestSolveNonlinear:
    def test_benchmark_exit_zero(self, tmp_path, capsys):
        code = run(["solve-nonlinear", problem("rotation_lv.json"), "-o", tmp_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "converged=True" in out
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["sufficiency"]["holds"]
        assert doc["iteration"]["converged"]
        assert (tmp_path / "solution.csv").exists()
        assert (tmp_path / "trace.csv").exists()
        sol = doc["trajectories"]["solution.csv"]
        assert sol["recurrence_residual"] <= 1e-8
        assert sol["boundary_residual"] <= 1e-8

    def test_sufficiency_failure_exit_four(self, tmp_path, capsys):
        code = run(["solve-nonlinear", problem("gate_refusal.json"), "-o", tmp_path])
        assert code == 4
        assert "FAILS" in capsys.readouterr().out
        doc = json.loads((tmp_path / "report.json").read_text())
        assert not doc["sufficiency"]["holds"]
        assert "iteration" not in doc

    def test_force_overrides_gate(self, tmp_path):
        code = run(["solve-nonlinear", problem("gate_refusal.json"), "-o", tmp_path,
                    "--force"])
        assert code in (0, 5)  # gate bypassed; iteration runs either way
        doc = json.loads((tmp_path / "report.json").read_text())
        assert "iteration" in doc

    def test_linear_only_problem_is_usage_error(self, tmp_path, capsys):
        code = run(["solve-nonlinear", problem("identity_resonant.json"),
                    "-o", tmp_path])
        assert code == 64
        assert "no nonlinearity" in capsys.readouterr().err


class TestSweep:
    def test_scalar_branch(self, tmp_path):
        code = run(["sweep", problem("sweep_scalar.json"), "--eps-min=-4e-4",
                    "--eps-max", "1e-3", "--count", "8", "-o", tmp_path])
        assert code == 0
        rows = (tmp_path / "branch.csv").read_text().strip().splitlines()
        assert rows[0].startswith("eps,exit,root_converged,F_norm")
        doc = json.loads((tmp_path / "report.json").read_text())
        for pt in doc["points"]:
            if pt["eps"] < 0:
                assert pt["exit"] == 3  # no real root of c^2 = eps
            elif pt["eps"] > 1e-6:
                assert pt["exit"] == 0
                assert abs(abs(pt["c0"][0]) - np.sqrt(pt["eps"])) <= 1e-6

    def test_bad_count_is_usage_error(self, tmp_path, capsys):
        code = run(["sweep", problem("sweep_scalar.json"), "--eps-min", "0",
                    "--eps-max", "1", "--count", "0", "-o", tmp_path])
        assert code == 64


class TestFibCheck:
    def test_reports_convention_and_census(self, capsys):
        code = run(["fib-check", "--m-max", "8"])
        assert code == 0
        out = capsys.readouterr().out
        assert "A^(m+2)" in out
        assert "a11: 284/284 agrees" in out
        assert "a12: 284/284 agrees" in out
        assert "a21: 44/284 DISAGREES" in out
        assert "a22: 4/284 DISAGREES" in out


class TestVerify:
    def test_recomputation_matches(self, tmp_path, capsys):
        run(["solve-nonlinear", problem("rotation_lv.json"), "-o", tmp_path])
        code = run(["verify", tmp_path / "report.json", tmp_path / "solution.csv"])
        assert code == 0
        assert "MISMATCH" not in capsys.readouterr().out

    def test_tampered_trajectory_is_flagged(self, tmp_path, capsys):
        run(["solve-nonlinear", problem("rotation_lv.json"), "-o", tmp_path])
        path = tmp_path / "solution.csv"
        lines = path.read_text().splitlines()
        cells = lines[1].split(",")
        cells[1] = repr(float(cells[1]) + 0.5)
        lines[1] = ",".join(cells)
        path.write_text("\n".join(lines) + "\n")
        code = run(["verify", tmp_path / "report.json", path])
        assert code == 1
        assert "MISMATCH" in capsys.readouterr().out

    def test_unknown_trajectory_name(self, tmp_path, capsys):
        run(["solve-linear", problem("identity_resonant.json"), "-o", tmp_path])
        code = run(["verify", tmp_path / "report.json", tmp_path / "nonexistent.csv"])
        assert code == 64


class TestUsage:
    def test_parse_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = run(["solve-linear", bad, "-o", tmp_path / "out"])
        assert code == 64
        assert "error:" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        assert run([]) == 64

    def test_help_exits_zero(self, capsys):
        assert run(["--help"]) == 0


class TestDeterminism:
    @pytest.mark.parametrize("name,cmd", [
        ("identity_resonant.json", ["solve-linear"]),
        ("rotation_lv.json", ["solve-nonlinear"]),
        ("sweep_scalar.json", ["sweep", "--eps-min", "0", "--eps-max", "1e-3",
                               "--count", "5"]),
    ])
    def test_reruns_are_byte_identical(self, tmp_path, name, cmd):
        outs = []
        for run_dir in ("a", "b"):
            d = tmp_path / run_dir
            run(cmd[:1] + [problem(name)] + cmd[1:] + ["-o", d, "--dump-canonical"])
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert outs[0].keys() == outs[1].keys()
        for k in outs[0]:
            assert outs[0][k] == outs[1][k], f"{name}: {k} differs between runs"
