"""Handler setup for the ``finsler`` logger tree.

Library modules log through ``logging.getLogger(__name__)`` and never touch
handlers. The CLI, the tool server and the utils scripts call
:func:`setup_logging` once at startup: records go to stderr (stdout carries
reports) and to ``logs/finsler.log``.
"""

from __future__ import annotations

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

from .paths import LOGS_DIR, ensure_dir

LEVEL_ENV = "FINSLER_LOG_LEVEL"
LOG_FILE = "finsler.log"
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
MAX_LOG_BYTES = 1_000_000
LOG_BACKUPS = 3


def resolve_level(level: str | None = None) -> int:
    """Numeric level from ``level``, else $FINSLER_LOG_LEVEL, else INFO."""
    name = (level or os.getenv(LEVEL_ENV) or "INFO").upper()
    value = logging.getLevelName(name)
    return value if isinstance(value, int) else logging.INFO


def _file_handler(log_dir: Path) -> RotatingFileHandler:
    return RotatingFileHandler(
        ensure_dir(log_dir) / LOG_FILE,
        maxBytes=MAX_LOG_BYTES,
        backupCount=LOG_BACKUPS,
        encoding="utf-8",
    )


def setup_logging(
    name: str = "finsler",
    level: str | None = None,
    log_dir: Path = LOGS_DIR,
) -> logging.Logger:
    """Attach the stderr and rotating-file handlers to logger ``name``.

    A second call only adjusts the level of the handlers already attached.
    """
    numeric = resolve_level(level)
    logger = logging.getLogger(name)
    logger.setLevel(numeric)
    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(numeric)
        return logger

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    try:
        handlers.append(_file_handler(log_dir))
    except OSError as e:
        logger.warning("logging to stderr only, cannot open %s: %s", log_dir, e)
    for handler in handlers:
        handler.setLevel(numeric)
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.debug("logger %r ready at %s", name, logging.getLevelName(numeric))
    return logger


__all__ = ["setup_logging", "resolve_level"]
