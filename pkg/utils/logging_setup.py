# utils/logging_setup.py

import logging
import sys

import coloredlogs

from config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logging(level: str = LOG_LEVEL) -> None:
    """Colored log records on stderr; stdout is reserved for reports."""
    if not isinstance(logging.getLevelName(level.upper()), int):
        level = "WARNING"
    coloredlogs.install(level=level.upper(), fmt=LOG_FORMAT, stream=sys.stderr)
    logging.captureWarnings(True)
