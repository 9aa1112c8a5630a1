"""Shared fixtures: rendered synthetic sequences."""

import pytest

from firefront.schemas.scenario import Scenario
from firefront.services.synth_service import scenario_config, write_scenario


@pytest.fixture
def disk_scenario() -> Scenario:
    """Clean expanding disk, 5 px/frame, small enough for fast end-to-end runs."""
    return Scenario(
        kind="expanding_disk",
        width=160,
        height=160,
        frames=10,
        radius0=15.0,
        speed_px_per_frame=5.0,
    )


@pytest.fixture
def disk_run(tmp_path, disk_scenario):
    """Rendered disk frames on disk plus the matching pipeline config (fits off)."""
    frames_dir = write_scenario(disk_scenario, tmp_path / "disk")
    config = scenario_config(disk_scenario)
    config = config.model_copy(
        update={"fitting": config.fitting.model_copy(update={"enabled": False})}
    )
    return frames_dir, config
