#!/usr/bin/env python3
"""Generate one synthetic sequence per scenario kind, ready for `firefront run`."""

import argparse
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from firefront.logging_config import setup_logging
from firefront.schemas.config import Roi
from firefront.schemas.scenario import Scenario
from firefront.services.synth_service import write_scenario

# Fixed seed for reproducibility
RANDOM_SEED = 42

# One preset per kind - sized so every front stays inside a 256x256 frame
PRESETS = [
    Scenario(kind="expanding_disk", seed=RANDOM_SEED, noise=0.002, burn_duration_frames=6),
    Scenario(kind="translating_front", seed=RANDOM_SEED, burn_duration_frames=8),
    Scenario(kind="ring_fire", seed=RANDOM_SEED, radius0=100.0, speed_px_per_frame=3.0),
    Scenario(
        kind="two_flanks",
        seed=RANDOM_SEED,
        separation=160.0,
        bow=20.0,
        burn_duration_frames=5,
    ),
    Scenario(
        kind="advected_plume",
        seed=RANDOM_SEED,
        center=(80.0, 200.0),
        plume_radius=30.0,
    ),
    Scenario(
        kind="expanding_disk",
        seed=RANDOM_SEED,
        modality="infrared",
        preheat_px=4.0,
        burn_duration_frames=6,
        occlusions=[Roi(x=150, y=40, width=20, height=20)],
    ),
]


def generate_all(out_dir: Path) -> None:
    for scenario in PRESETS:
        name = f"{scenario.kind}_{scenario.modality}"
        frames_dir = write_scenario(scenario, out_dir / name)
        print(f"Generated {scenario.frames} frames for {name} in {frames_dir}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("scenarios"), help="Output root")
    args = parser.parse_args()
    setup_logging()
    generate_all(args.out)
