import logging
import sys

from markov_ktree.config import KTREE_LOG


def get_logger(name: str) -> logging.Logger:
    """Get a simple logger with timestamp formatting, level taken from KTREE_LOG."""
    logger = logging.getLogger(f"markov_ktree.{name}")

    if not logger.handlers:
        logger.setLevel(KTREE_LOG)
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(
            '%(asctime)s | %(name)s | %(levelname)s | %(message)s',
            datefmt='%H:%M:%S'
        ))
        logger.addHandler(handler)
        logger.propagate = False

    return logger
