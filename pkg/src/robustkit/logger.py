import logging
import os
import sys

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

logger = logging.getLogger("robustkit")


def setup_logging(level=None):
    """Send robustkit diagnostics to stderr; stdout carries reports only."""
    level = level or os.getenv('ROBUSTKIT_LOG_LEVEL', 'WARNING')
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    logger.setLevel(level)
    return logger
