"""Unit tests for the command-line interface."""

import pytest

from netbell import __version__
from netbell.commands.cli import build_parser, main
from netbell.commands.oracle import OracleArguments, cmd_oracle


def run_cli(argv):
    """Exit code of ``netbell argv``."""
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


@pytest.mark.unit
class TestOracleCommand:
    """Test closed-form values printed by ``netbell oracle``."""

    @pytest.mark.parametrize(
        ("argv", "expected"),
        [
            (["classical-star", "n=3", "k=1"], "1.25992104989"),
            (["horodecki", "state=phi_plus"], "2.82842712475"),
            (["horodecki", "psi_minus", "visibility=0.5"], "1.41421356237"),
            (["curve", "dephasing", "star", "uniform", "gamma=0.5"], "1.11803398875"),
            (["max-star", "n=2", "visibility=0.9"], "1.27279220614"),
            (["max-chain", "n=4"], "1.41421356237"),
            (["amplitude-damping-breaking", "gamma1=0.3"], "true"),
            (["amplitude-damping-breaking", "gamma1=0.1", "gamma2=0.2"], "false"),
        ],
    )
    def test_values(self, capsys, argv, expected):
        """Test printed values with twelve significant digits."""
        assert run_cli(["oracle", *argv]) == 0
        assert capsys.readouterr().out.strip() == expected

    def test_maxent_grid(self, capsys):
        """Test the grid search without noise."""
        assert cmd_oracle("maxent-grid", ["gamma=0", "resolution=6"]) == 0
        assert capsys.readouterr().out.strip() == "2.82842712475"

    def test_maxent_grid_rejects_detector_noise(self, capsys):
        """Test that only Kraus channels enter the grid search."""
        assert cmd_oracle("maxent-grid", ["white_noise_detector", "gamma=0.1"]) == 1
        assert "not a single-qubit Kraus channel" in capsys.readouterr().out

    def test_unknown_oracle(self, capsys):
        """Test the list of available oracles."""
        assert run_cli(["oracle", "tsirelson"]) == 1
        out = capsys.readouterr().out
        assert "Unknown oracle 'tsirelson'" in out
        assert "classical-star n=<int> k=<int>" in out

    def test_missing_argument(self, capsys):
        """Test the usage line after an argument error."""
        assert cmd_oracle("classical-star", ["n=3"]) == 1
        out = capsys.readouterr().out
        assert "missing argument k=..." in out
        assert "usage: classical-star" in out

    def test_unsupported_curve(self, capsys):
        """Test that a model without closed form is an invalid request."""
        assert cmd_oracle("curve", ["amplitude_damping", "chsh", "gamma=0.1"]) == 1
        assert "no closed form" in capsys.readouterr().out

    def test_arguments(self):
        """Test positional words and options."""
        args = OracleArguments(["dephasing", "Gamma=0.5", "star"])
        assert args.words == ["dephasing", "star"]
        assert args.word(1, "network") == "star"
        assert args.word(2, "placement", "uniform") == "uniform"
        assert args.number("gamma") == 0.5
        with pytest.raises(ValueError, match="missing argument model"):
            OracleArguments([]).word(0, "model")


@pytest.mark.unit
class TestRunCommands:
    """Test argument handling of ``optimize``, ``scan`` and ``verify``."""

    def test_version(self, capsys):
        """Test the version flag."""
        assert run_cli(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_subcommand_required(self):
        """Test that a subcommand must be named."""
        assert run_cli([]) == 2

    def test_dump_config(self, capsys, monkeypatch):
        """Test printing the resolved configuration."""
        monkeypatch.delenv("NETBELL_OUTPUT_DIR", raising=False)
        assert run_cli(["optimize", "--network", "bilocal", "--dump-config"]) == 0
        out = capsys.readouterr().out
        assert "network: bilocal" in out
        assert "step_size: 1.4" in out

    def test_invalid_config(self, capsys):
        """Test that invalid fields are listed and nothing runs."""
        assert run_cli(["optimize", "--network", "ring:3", "--steps", "0"]) == 1
        out = capsys.readouterr().out
        assert "Configuration invalid" in out
        assert "optimizer.num_steps" in out

    def test_missing_config_file(self, capsys, temp_dir):
        """Test an unreadable config file."""
        assert run_cli(["scan", "--config", str(temp_dir / "none.yaml")]) == 1
        assert "cannot read config file" in capsys.readouterr().out

    def test_optimize_needs_single_gamma(self, capsys, temp_dir):
        """Test that grids belong to scan."""
        argv = ["optimize", "--gamma-grid", "0", "0.2", "0.1"]
        assert run_cli([*argv, "--output-dir", str(temp_dir / "out")]) == 1
        assert "single gamma" in capsys.readouterr().out
        assert not (temp_dir / "out").exists()

    def test_placement_indices(self):
        """Test comma-separated placements and ansatz lists."""
        args = build_parser().parse_args(
            [
                "scan",
                "--placement",
                "0,2",
                "--preparation",
                "phi_plus_state_preparation,classical_state_preparation",
            ]
        )
        assert args.placement == [0, 2]
        assert args.preparation == [
            "phi_plus_state_preparation",
            "classical_state_preparation",
        ]

    def test_verify_unknown_criterion(self, capsys):
        """Test that unknown criteria are rejected before running."""
        assert run_cli(["verify", "--criteria", "99"]) == 1
        assert "Unknown criteria [99]" in capsys.readouterr().out

    def test_verify_unknown_fault(self, capsys):
        """Test that faults exist only for some criteria."""
        assert run_cli(["verify", "--inject-fault", "1", "--criteria", "1"]) == 1
        assert "No fault for criterion 1" in capsys.readouterr().out

    def test_verify_criteria_format(self):
        """Test the criterion list format."""
        assert run_cli(["verify", "--criteria", "one,two"]) == 2
