"""Logging configuration for firefront."""

import logging
from datetime import datetime
from pathlib import Path

from firefront.config import LOG_DIR, LOG_LEVEL

_HANDLER_TAG = "_firefront_handler"


def setup_logging(level: str | None = None, log_dir: str | Path | None = None) -> Path:
    """Configure logging with file and console handlers."""
    logs_dir = Path(log_dir or LOG_DIR)
    logs_dir.mkdir(parents=True, exist_ok=True)

    # Log file with date
    log_file = logs_dir / f"firefront-{datetime.now().strftime('%Y-%m-%d')}.log"

    # Format: timestamp - level - logger - message
    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%H:%M:%S",
    )

    root_logger = logging.getLogger()
    # Re-running setup (tests, repeated CLI calls) must not stack handlers
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()

    file_handler = logging.FileHandler(log_file)
    file_handler.setFormatter(formatter)
    file_handler.setLevel(logging.DEBUG)

    # Console goes to stderr; stdout is reserved for the run report
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.INFO)

    for handler in (file_handler, console_handler):
        setattr(handler, _HANDLER_TAG, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(getattr(logging, (level or LOG_LEVEL).upper()))

    # Quiet down noisy libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)

    logging.info(f"Logging initialized - file: {log_file}")
    return log_file
