from __future__ import annotations

import logging
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path

from .config import LOG_FILE, LOG_LEVEL, LOG_ROTATE_WHEN

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s | %(message)s"


def setup_logging(log_file: str | None = None) -> None:
    """Configure root logging: stderr always, a rotating file when one is configured."""

    root = logging.getLogger()
    # Avoid duplicating handlers when called multiple times
    if getattr(root, "_polybilliards_configured", False):
        return

    root.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
    formatter = logging.Formatter(LOG_FORMAT)

    path = log_file if log_file is not None else LOG_FILE
    if path:
        log_path = Path(path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = TimedRotatingFileHandler(
            log_path,
            when=LOG_ROTATE_WHEN,
            backupCount=7,
            encoding="utf-8",
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)
    root.addHandler(stream_handler)
    root._polybilliards_configured = True
