"""
Tests for the command-line front end.
"""
import json
import math

import pytest
import sys
import os

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_IO_ERROR, EXIT_OK
from bilocal.exceptions import DomainViolationError, StateValidationError
import main as cli
from main import main, parse_state_spec

HALF_ROOT = "0.7071067811865476"


def report_values(text):
    values = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if sep:
            values[key] = value
    return values


class TestStateSpecs:
    """Test state argument parsing."""

    def test_families(self):
        assert parse_state_spec("t:-1,-1,-1").x.q == -0.5
        assert parse_state_spec("werner:0.5").t.c3 == -0.5
        assert parse_state_spec("alpha:0.8").x.p == pytest.approx(0.4)
        assert parse_state_spec("hidden:0.5").t is None
        assert parse_state_spec("x:0.5,0,0,0.5,2.4e-1,0").x.p == 0.24

    def test_arity(self):
        with pytest.raises(StateValidationError, match="expected 3"):
            parse_state_spec("t:0.1,0.2")

    def test_unknown_family(self):
        with pytest.raises(StateValidationError):
            parse_state_spec("bell:1")

    def test_not_a_number(self):
        with pytest.raises(StateValidationError):
            parse_state_spec("werner:half")

    def test_hidden_range(self):
        with pytest.raises(DomainViolationError):
            parse_state_spec("hidden:2")


class TestAssess:
    """Test the assess subcommand."""

    def test_singlet(self, capsys):
        assert main(["assess", "t:-1,-1,-1"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert float(values["horodecki_M"]) == pytest.approx(math.sqrt(2))
        assert values["chsh_verdict"] == "nonlocal"
        assert float(values["concurrence"]) == pytest.approx(1.0)
        assert values["steering_pre"] == "steerable-guaranteed"

    def test_invalid_state(self, capsys):
        assert main(["assess", "x:0.5,0,0,0.5,0.6,0"]) == EXIT_INPUT_ERROR
        assert "p²≤ςd violated" in capsys.readouterr().err

    def test_non_finite_state(self, capsys):
        assert main(["assess", "t:nan,0,0"]) == EXIT_INPUT_ERROR
        assert "c1 must be finite" in capsys.readouterr().err
        assert main(["assess", "x:0.5,0,0,0.5,inf,0"]) == EXIT_INPUT_ERROR
        assert "p must be finite" in capsys.readouterr().err

    def test_degenerate_steering_branch(self, capsys):
        assert main(["assess", "x:1,0,0,0,0,0"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert "degenerate" in values["steering"]


class TestBilocal:
    """Test the bilocal subcommand."""

    def test_werner_boundary(self, capsys):
        state = f"werner:{HALF_ROOT}"
        assert main(["bilocal", state, state, "--mode", "analytic"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert float(values["B1"]) == pytest.approx(1.0)
        assert values["verdict"] == "boundary"
        assert "numeric_B" not in values

    def test_both_modes(self, capsys):
        assert main(["bilocal", "t:-1,-1,-1", "t:-1,-1,-1"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert float(values["numeric_B"]) == pytest.approx(math.sqrt(2), abs=1e-8)
        assert abs(float(values["numeric_minus_analytic"])) < 1e-8
        assert values["verdict"] == "nonbilocal"
        assert values["angles"].startswith("theta_a0=")

    def test_negative_radicand_note(self, capsys):
        assert main(["bilocal", "t:0,0,1", "t:0,0,-1", "--mode", "analytic"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert values["B1"] == "0"
        assert "negative radicand" in values["B1_note"]


class TestSwapAndFilter:
    """Test the swap and filter subcommands."""

    def test_swap_singlets(self, capsys):
        assert main(["swap", "t:-1,-1,-1", "t:-1,-1,-1"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 4
        assert lines[2].startswith("branch 10 (psi+): probability=0.25")

    def test_swap_null_branch(self, capsys):
        assert main(["swap", "x:1,0,0,0,0,0", "x:1,0,0,0,0,0"]) == EXIT_OK
        assert "null branch" in capsys.readouterr().out

    def test_hidden_default_filter(self, capsys):
        assert main(["filter", "hidden:0.5"]) == EXIT_OK
        values = report_values(capsys.readouterr().out)
        assert float(values["chsh_bound"]) == pytest.approx(2 * math.sqrt(1.5), rel=1e-5)

    def test_explicit_filter(self, capsys):
        assert main(["filter", "werner:0.9", "--l1", "0.5", "--l2", "0.5"]) == EXIT_OK
        assert "table_value" in capsys.readouterr().out

    def test_filter_requires_attenuations(self, capsys):
        assert main(["filter", "werner:0.9"]) == EXIT_INPUT_ERROR
        assert "--l1" in capsys.readouterr().err

    def test_filter_range(self):
        assert main(["filter", "werner:0.9", "--l1", "0", "--l2", "0.5"]) == EXIT_INPUT_ERROR


class TestScan:
    """Test the scan subcommand."""

    def test_fig5_stdout(self, capsys):
        assert main(["scan", "--fig", "5", "--step", "0.5"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "alpha1,alpha2,s1_value,nonbilocal"
        assert len(lines) == 10

    def test_json_file(self, tmp_path):
        out = tmp_path / "fig6.json"
        assert main(["scan", "--fig", "6", "--step", "1", "--format", "json", "--out", str(out)]) == EXIT_OK
        assert len(json.loads(out.read_text(encoding="utf-8"))) == 9

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "werner.cfg"
        cfg.write_text("family = werner\naxis.alpha = 0, 1, 0.5\ncriteria = r7\n", encoding="utf-8")
        assert main(["scan", "--config", str(cfg)]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "alpha,r7_value,nonbilocal"

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("family = fig2\naxis.c9 = 0, 1, 0.5\n", encoding="utf-8")
        assert main(["scan", "--config", str(cfg)]) == EXIT_INPUT_ERROR

    def test_unwritable_output(self, tmp_path):
        out = tmp_path / "missing" / "out.csv"
        assert main(["scan", "--fig", "6", "--step", "1", "--out", str(out)]) == EXIT_IO_ERROR


class TestArguments:
    """Test argument errors and help."""

    def test_missing_subcommand(self):
        assert main([]) == EXIT_INPUT_ERROR

    def test_unknown_figure(self):
        assert main(["scan", "--fig", "9"]) == EXIT_INPUT_ERROR

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "bilocal" in capsys.readouterr().out

    def test_unexpected_error_is_internal(self, monkeypatch, capsys):
        def broken(rho):
            raise RuntimeError("broken")

        monkeypatch.setattr(cli, "chsh_report", broken)
        assert main(["assess", "t:-1,-1,-1"]) == EXIT_INTERNAL_ERROR
        assert EXIT_INTERNAL_ERROR not in (EXIT_OK, EXIT_INPUT_ERROR, EXIT_IO_ERROR)
