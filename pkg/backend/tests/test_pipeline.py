"""End-to-end tests of the pipeline on rendered scenarios."""

import math
import time
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from firefront.errors import ConfigError, PipelineStageError
from firefront.schemas.config import FittingConfig, Roi
from firefront.schemas.scenario import Scenario
from firefront.services.export_service import read_bundle
from firefront.services.pipeline_service import advise, format_report, run_pipeline
from firefront.services.stats_service import u_max
from firefront.services.synth_service import scenario_config, write_scenario


def _expected_speed(sc: Scenario) -> float:
    # Scenarios are read at their native rate, so one frame is 1/f seconds
    return sc.speed_px_per_frame * sc.frame_rate_hz / sc.resolution_px_per_cm


def _file_bytes(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in root.rglob("*") if p.is_file()}


def _no_fits(config):
    return config.model_copy(update={"fitting": FittingConfig(enabled=False)})


class TestRunPipeline:
    """Tests for run_pipeline."""

    def test_clean_disk_speed(self, tmp_path, disk_run, disk_scenario):
        """Test the recovered mean boundary speed of a clean expanding disk."""
        frames_dir, config = disk_run
        bundle, report = run_pipeline(config, frames_dir, tmp_path / "out")

        assert report.frames == disk_scenario.frames
        assert report.regions_per_frame == [1] * disk_scenario.frames
        assert report.mean_speed == pytest.approx(_expected_speed(disk_scenario), rel=0.1)
        assert report.match_rate == 1.0
        assert (tmp_path / "out" / "manifest.json").exists()
        assert len(bundle.labels) == disk_scenario.frames

    def test_noisy_disk_speed(self, tmp_path):
        """Test salt noise is cleaned and the speed stays within 10%."""
        sc = Scenario(
            kind="expanding_disk",
            width=160,
            height=160,
            frames=10,
            radius0=15.0,
            speed_px_per_frame=5.0,
            noise=0.005,
            seed=1,
        )
        frames_dir = write_scenario(sc, tmp_path / "noisy")
        _, report = run_pipeline(_no_fits(scenario_config(sc)), frames_dir)
        assert report.mean_speed == pytest.approx(_expected_speed(sc), rel=0.1)

    @pytest.mark.parametrize(("noise", "rel"), [(0.0, 0.03), (0.005, 0.1)])
    def test_large_disk_at_two_px_per_frame(self, tmp_path, noise, rel):
        """Test a 512x512, 60-frame disk growing 2 px/frame is tracked accurately in < 30 s."""
        sc = Scenario(
            kind="expanding_disk",
            width=512,
            height=512,
            frames=60,
            speed_px_per_frame=2.0,
            noise=noise,
            seed=3,
        )
        frames_dir = write_scenario(sc, tmp_path / "large")
        config = _no_fits(scenario_config(sc))

        started = time.perf_counter()
        _, report = run_pipeline(config, frames_dir)
        elapsed = time.perf_counter() - started

        assert report.mean_speed == pytest.approx(_expected_speed(sc), rel=rel)
        assert elapsed < 30.0

    def test_bundle_round_trip(self, tmp_path, disk_run):
        """Test the written bundle reads back to the in-memory results."""
        frames_dir, config = disk_run
        bundle, _ = run_pipeline(config, frames_dir, tmp_path / "out")
        loaded = read_bundle(tmp_path / "out")

        for a, b in zip(bundle.labels, loaded.labels, strict=True):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(loaded.velocity.vx, bundle.velocity.vx)
        assert loaded.manifest.config_sha256 == config.sha256()
        assert len(loaded.manifest.input_checksums) == len(bundle.labels)
        assert sum(len(f) for f in loaded.displacements) == len(bundle.velocity.vx)
        np.testing.assert_array_equal(
            np.concatenate([f.src for f in loaded.displacements]), bundle.velocity.src
        )

    def test_tracking_disabled(self, tmp_path, disk_run):
        """Test disabling tracking leaves velocity out of the bundle and the report."""
        frames_dir, config = disk_run
        config = config.model_copy(
            update={"tracking": config.tracking.model_copy(update={"enabled": False})}
        )
        bundle, report = run_pipeline(config, frames_dir, tmp_path / "out")
        assert bundle.velocity is None
        assert not (tmp_path / "out" / "velocity.csv").exists()
        assert report.mean_speed is None
        assert "burn_time" in report.summaries

    def test_moment_fits_and_skipped_targets(self, tmp_path, disk_run):
        """Test configured fits run and a target without samples is skipped with a warning."""
        frames_dir, config = disk_run
        fitting = FittingConfig(methods=["moment_matching"])
        config = config.model_copy(
            update={
                "fitting": fitting,
                "tracking": config.tracking.model_copy(update={"enabled": False}),
            }
        )
        _, report = run_pipeline(config, frames_dir, tmp_path / "out")

        assert [(f.sample, f.family) for f in report.fits] == [("burn_time", "erlang")]
        assert any("longitudinal_positive" in w for w in report.warnings)
        assert (tmp_path / "out" / "fits.json").exists()

    def test_thread_count_does_not_change_output(self, tmp_path, disk_run):
        """Test one and eight workers write byte-identical bundles, manifest included."""
        frames_dir, config = disk_run
        run_pipeline(config, frames_dir, tmp_path / "one", threads=1)
        run_pipeline(config, frames_dir, tmp_path / "many", threads=8)

        one, many = _file_bytes(tmp_path / "one"), _file_bytes(tmp_path / "many")
        assert "manifest.json" in one
        assert "velocity.csv" in one
        assert sorted(one) == sorted(many)
        for rel, data in one.items():
            assert data == many[rel], f"{rel} differs"

    def test_stage_error_names_stage_and_frame(self, disk_run):
        """Test a failing stage aborts with the stage name and frame index."""
        frames_dir, config = disk_run
        with patch(
            "firefront.services.pipeline_service.segment_classes",
            side_effect=ValueError("bad pixels"),
        ):
            with pytest.raises(PipelineStageError) as excinfo:
                run_pipeline(config, frames_dir)
        assert excinfo.value.stage == "segment"
        assert excinfo.value.frame_index == 0
        assert excinfo.value.exit_code == 4
        assert "bad pixels" in str(excinfo.value)

    def test_overlays_exported(self, tmp_path, disk_run):
        """Test overlay PNGs are written when enabled."""
        frames_dir, config = disk_run
        config = config.model_copy(
            update={"export": config.export.model_copy(update={"overlays": True})}
        )
        run_pipeline(config, frames_dir, tmp_path / "out")
        overlays = tmp_path / "out" / "overlays"
        assert (overlays / "boundary_t000000.png").exists()
        assert (overlays / "quiver_t000000.png").exists()
        assert (overlays / "hist_burn_time_erlang.png").exists()

    def test_plume_inclination(self, tmp_path):
        """Test the advected plume's rise angle atan(w/u) is recovered within 2 degrees."""
        sc = Scenario(
            kind="advected_plume",
            width=160,
            height=256,
            frames=12,
            center=(60.0, 200.0),
            plume_radius=30.0,
        )
        frames_dir = write_scenario(sc, tmp_path / "plume")
        _, report = run_pipeline(_no_fits(scenario_config(sc)), frames_dir)

        u, w = sc.plume_velocity
        assert report.inclination_deg == pytest.approx(math.degrees(math.atan2(w, u)), abs=2.0)

    def test_infrared_with_occlusion(self, tmp_path):
        """Test an occluded infrared disk is inpainted and still tracked as one region."""
        sc = Scenario(
            kind="expanding_disk",
            width=128,
            height=128,
            frames=6,
            radius0=12.0,
            speed_px_per_frame=4.0,
            modality="infrared",
            occlusions=[Roi(x=100, y=10, width=12, height=12)],
        )
        frames_dir = write_scenario(sc, tmp_path / "ir")
        _, report = run_pipeline(_no_fits(scenario_config(sc)), frames_dir)
        assert report.regions_per_frame == [1] * sc.frames
        assert report.mean_speed == pytest.approx(_expected_speed(sc), rel=0.15)

    def test_format_report(self, disk_run):
        """Test the text report lists frames, speed and sample summaries."""
        frames_dir, config = disk_run
        _, report = run_pipeline(config, frames_dir)
        text = format_report(report)
        assert "Frames processed: 10" in text
        assert "Mean speed:" in text
        assert "magnitude" in text


class TestAdvise:
    """Tests for the sampling-rate advisor run."""

    def test_rows_per_rate(self, disk_run):
        """Test one row per candidate rate with u_max from the config geometry."""
        frames_dir, config = disk_run
        report = advise(config, frames_dir, [10.0, 15.0, 30.0])
        meta = config.sequence
        assert [row.f_hz for row in report.rows] == [10.0, 15.0, 30.0]
        for row in report.rows:
            assert row.u_max == pytest.approx(u_max(row.f_hz, meta.fov_px, 1.27))
            assert row.u_obs > 0

    def test_rate_that_does_not_divide(self, disk_run):
        """Test a rate that is not an integer stride of the frame rate raises ConfigError."""
        frames_dir, config = disk_run
        with pytest.raises(ConfigError):
            advise(config, frames_dir, [7.0])
