"""Structured logging: one JSON object per record on stderr."""

import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Any, Dict

LOGGER_PREFIX = "kmweyl"

# Attributes every LogRecord carries; anything else arrived through `extra=`.
_RECORD_ATTRIBUTES = frozenset(
    vars(logging.LogRecord("", logging.INFO, "", 0, "", None, None))
) | {"message", "asctime", "taskName"}

_level: int = logging.INFO


class JSONLineFormatter(logging.Formatter):
    """Render a record as a single JSON line.

    Fixed keys are timestamp (UTC, "Z" suffix), level, message, file and line;
    `extra=` fields follow, and "exception" holds the formatted traceback when
    the record carries one.
    """

    def format(self, record: logging.LogRecord) -> str:
        stamp = datetime.fromtimestamp(record.created, tz=timezone.utc)
        entry: Dict[str, Any] = {
            "timestamp": stamp.isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "message": record.getMessage(),
            "file": os.path.basename(record.pathname),
            "line": record.lineno,
        }
        entry.update(
            (key, value)
            for key, value in vars(record).items()
            if key not in _RECORD_ATTRIBUTES and not key.startswith("_")
        )
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def get_logger(name: str) -> logging.Logger:
    """Return the `kmweyl.<name>` logger, attaching the JSON stderr handler once.

    Args:
        name: Module or class name appended to the package prefix

    Returns:
        A non-propagating logger at the current package level
    """
    logger = logging.getLogger(f"{LOGGER_PREFIX}.{name}")
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(JSONLineFormatter())
        logger.addHandler(handler)
        logger.setLevel(_level)
        logger.propagate = False
    return logger


def set_level(level: str | int) -> None:
    """Set the level of existing and future kmweyl loggers.

    Args:
        level: A logging level name ("DEBUG", "INFO", ...) or number
    """
    global _level
    _level = logging.getLevelName(level.upper()) if isinstance(level, str) else level
    prefix = f"{LOGGER_PREFIX}."
    for name, candidate in list(logging.Logger.manager.loggerDict.items()):
        if name.startswith(prefix) and isinstance(candidate, logging.Logger):
            candidate.setLevel(_level)
