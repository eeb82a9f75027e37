"""loguru sink setup driven by STASHKIT_LOG."""
import sys

from loguru import logger

LEVELS = {
    "quiet": "WARNING",
    "info": "INFO",
    "debug": "DEBUG",
}

FORMAT = "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <7}</level> | {name}:{function} - {message}"


def configure_logging(level: str = "info") -> str:
    """Install a single stderr sink.

    Args:
        level: One of quiet | info | debug (unknown values fall back to info)

    Returns:
        The loguru level name in effect
    """
    loguru_level = LEVELS.get(level.lower(), "INFO")
    logger.remove()
    logger.add(sys.stderr, level=loguru_level, format=FORMAT, colorize=False)
    return loguru_level
