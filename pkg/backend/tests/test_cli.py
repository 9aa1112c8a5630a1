"""Tests for the firefront command-line entry point and its exit codes."""

import json

import numpy as np
import pandas as pd
import pytest

from firefront.errors import EXIT_IO, EXIT_OK, EXIT_VALIDATION
from firefront.main import build_parser, main
from firefront.schemas.config import PipelineConfig


@pytest.fixture
def cli(tmp_path):
    """Run main() with logs kept under tmp_path."""

    def run(*argv: str) -> int:
        return main(["--log-dir", str(tmp_path / "logs"), *argv])

    return run


@pytest.fixture
def small_scenario(tmp_path, cli):
    """A rendered 64x64 disk plus a config with fitting switched off."""
    out = tmp_path / "scenario"
    code = cli(
        "synth", "--kind", "expanding_disk", "--width", "64", "--height", "64",
        "--frames", "4", "--out", str(out),
    )  # fmt: skip
    assert code == EXIT_OK
    config = json.loads((out / "config.json").read_text())
    config["fitting"]["enabled"] = False
    (out / "config.json").write_text(json.dumps(config))
    return out


class TestParser:
    """Tests for build_parser."""

    def test_subcommands_registered(self):
        """Test every subcommand parses with its required arguments."""
        parser = build_parser()
        args = parser.parse_args(["config", "init"])
        assert args.command == "config"
        args = parser.parse_args(
            ["advise", "--config", "c.json", "--input", "f", "--rates", "2", "5"]
        )
        assert args.rates == [2.0, 5.0]

    def test_missing_subcommand(self):
        """Test running without a subcommand is an argparse usage error."""
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args([])
        assert excinfo.value.code == 2


class TestConfigInit:
    """Tests for firefront config init."""

    def test_writes_valid_default(self, tmp_path, cli):
        """Test the written document validates back into the defaults."""
        path = tmp_path / "config.json"
        assert cli("config", "init", "--out", str(path)) == EXIT_OK
        config = PipelineConfig.model_validate_json(path.read_text())
        assert config == PipelineConfig()

    def test_prints_to_stdout(self, cli, capsys):
        """Test the defaults go to stdout without --out."""
        assert cli("config", "init") == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["sequence"]["resolution_px_per_cm"] == 1.27


class TestSynthAndRun:
    """Tests for firefront synth and firefront run."""

    def test_synth_layout(self, small_scenario):
        """Test synth writes frames, truth and a runnable config."""
        assert len(list((small_scenario / "frames").glob("frame_*.png"))) == 4
        assert (small_scenario / "truth" / "burn_time.csv").exists()
        assert (small_scenario / "scenario.json").exists()

    def test_run_writes_bundle(self, tmp_path, cli, small_scenario, capsys):
        """Test run exports a bundle and prints the report."""
        out = tmp_path / "bundle"
        code = cli(
            "run",
            "--config", str(small_scenario / "config.json"),
            "--input", str(small_scenario / "frames"),
            "--out", str(out),
        )  # fmt: skip
        assert code == EXIT_OK
        assert (out / "manifest.json").exists()
        assert (out / "velocity.csv").exists()
        assert "Frames processed: 4" in capsys.readouterr().out

    def test_synth_invalid_noise(self, tmp_path, cli):
        """Test an out-of-range scenario field exits with the validation code."""
        code = cli("synth", "--kind", "ring_fire", "--noise", "2.0", "--out", str(tmp_path / "x"))
        assert code == EXIT_VALIDATION


class TestExitCodes:
    """Tests for error-to-exit-code mapping."""

    def test_missing_config_file(self, tmp_path, cli):
        """Test an unreadable config is an I/O failure."""
        code = cli(
            "run",
            "--config", str(tmp_path / "missing.json"),
            "--input", str(tmp_path),
            "--out", str(tmp_path / "out"),
        )  # fmt: skip
        assert code == EXIT_IO

    def test_invalid_config(self, tmp_path, cli):
        """Test a schema violation in the config is a validation failure."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"sequence": {"sample_rate_hz": -1}}))
        code = cli(
            "run", "--config", str(path), "--input", str(tmp_path), "--out", str(tmp_path / "o")
        )
        assert code == EXIT_VALIDATION

    def test_empty_input_directory(self, tmp_path, cli):
        """Test a stage failure carries the exit code of its cause."""
        empty = tmp_path / "empty"
        empty.mkdir()
        config = tmp_path / "config.json"
        config.write_text(PipelineConfig().model_dump_json())
        code = cli(
            "run", "--config", str(config), "--input", str(empty), "--out", str(tmp_path / "o")
        )
        assert code == EXIT_IO
        assert not (tmp_path / "o").exists()

    def test_rate_that_does_not_divide(self, cli, small_scenario):
        """Test advise rejects a rate that is not an integer stride."""
        code = cli(
            "advise",
            "--config", str(small_scenario / "config.json"),
            "--input", str(small_scenario / "frames"),
            "--rates", "7",
        )  # fmt: skip
        assert code == EXIT_VALIDATION


class TestFit:
    """Tests for firefront fit."""

    def test_moment_fit_from_csv(self, tmp_path, cli):
        """Test a single-column CSV is fitted and the results written as JSON."""
        rng = np.random.default_rng(3)
        samples = tmp_path / "speeds.csv"
        pd.DataFrame({"speed": rng.exponential(1.0 / 0.2, 5000)}).to_csv(samples, index=False)
        out = tmp_path / "fits.json"
        plot = tmp_path / "fit.png"

        code = cli(
            "fit", "--samples", str(samples), "--method", "moment_matching",
            "--out", str(out), "--plot", str(plot),
        )  # fmt: skip
        assert code == EXIT_OK
        fits = json.loads(out.read_text())
        assert fits[0]["family"] == "exponential"
        assert fits[0]["lambda"] == pytest.approx(0.2, rel=0.05)
        assert plot.exists()

    def test_ambiguous_columns(self, tmp_path, cli):
        """Test a multi-column CSV without --column is a validation failure."""
        samples = tmp_path / "two.csv"
        pd.DataFrame({"a": [1.0, 2.0], "b": [3.0, 4.0]}).to_csv(samples, index=False)
        code = cli("fit", "--samples", str(samples), "--out", str(tmp_path / "f.json"))
        assert code == EXIT_VALIDATION


class TestExport:
    """Tests for firefront export."""

    def test_member_subset(self, tmp_path, cli, small_scenario):
        """Test re-exporting keeps only the chosen members and the provenance."""
        bundle = tmp_path / "bundle"
        code = cli(
            "run",
            "--config", str(small_scenario / "config.json"),
            "--input", str(small_scenario / "frames"),
            "--out", str(bundle),
        )  # fmt: skip
        assert code == EXIT_OK
        subset = tmp_path / "subset"
        code = cli("export", "--bundle", str(bundle), "--out", str(subset), "--members", "velocity")
        assert code == EXIT_OK

        manifest = json.loads((subset / "manifest.json").read_text())
        original = json.loads((bundle / "manifest.json").read_text())
        assert manifest["files"] == ["velocity.csv"]
        assert manifest["config_sha256"] == original["config_sha256"]
        assert (subset / "velocity.csv").read_bytes() == (bundle / "velocity.csv").read_bytes()

    def test_missing_bundle(self, tmp_path, cli):
        """Test a directory without a manifest is an I/O failure."""
        code = cli("export", "--bundle", str(tmp_path), "--out", str(tmp_path / "o"))
        assert code == EXIT_IO
