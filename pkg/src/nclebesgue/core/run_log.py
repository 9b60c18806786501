"""File logging for a single CLI command."""

from __future__ import annotations

import logging
from collections.abc import Generator
from contextlib import contextmanager
from pathlib import Path

LOGGER_NAME = "nclebesgue"


def get_logger() -> logging.Logger:
    """Return the package root logger."""
    return logging.getLogger(LOGGER_NAME)


@contextmanager
def run_log_context(
    log_file: Path | None,
    verbose: bool = False,
) -> Generator[logging.Logger, None, None]:
    """
    Attach a file handler to the package logger for the duration of the context.
    Log file is UTF-8; format: timestamp [LEVEL] message. Without a file this only sets the level.
    """
    logger = get_logger()
    level = logging.DEBUG if verbose else logging.INFO
    previous = logger.level
    logger.setLevel(level)
    if log_file is None:
        try:
            yield logger
        finally:
            logger.setLevel(previous)
        return

    Path(log_file).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, encoding="utf-8")
    handler.setLevel(level)
    formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
    handler.setFormatter(formatter)
    logger.addHandler(handler)

    try:
        yield logger
    finally:
        logger.removeHandler(handler)
        handler.close()
        logger.setLevel(previous)
