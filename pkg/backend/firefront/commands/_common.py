"""Argument helpers shared by the CLI subcommands."""

import argparse
import json
from pathlib import Path

from firefront.config import DEFAULT_THREADS
from firefront.errors import ExportError, LoadError
from firefront.schemas.config import PipelineConfig


def add_config_argument(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--config", type=Path, required=required, help="Pipeline configuration JSON"
    )


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument(
        "--threads", type=int, default=DEFAULT_THREADS, help="Worker cap for per-frame stages"
    )


def load_config(path: Path | None, seed: int | None = None) -> PipelineConfig:
    """Parse and validate a config document; validation errors propagate unchanged."""
    if path is None:
        config = PipelineConfig()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise LoadError(path, exc.strerror or str(exc)) from exc
        config = PipelineConfig.model_validate_json(text)
    if seed is not None:
        config = PipelineConfig.model_validate({**config.model_dump(), "seed": seed})
    return config


def write_json(path: Path, payload) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ExportError(path, exc.strerror or str(exc)) from exc
