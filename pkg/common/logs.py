"""
ZoneGraph Logging
One place that wires the `zonegraph` logger hierarchy.

File handler gets everything at DEBUG with call-site detail, the console only
sees warnings and above unless verbose output is requested.
"""

import logging
from pathlib import Path
from typing import Optional

LOGGER_NAME = 'zonegraph'

FILE_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s:%(lineno)d | %(message)s'
CONSOLE_FORMAT = '%(levelname)s: %(message)s'


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a logger below the zonegraph root.

    Args:
        name: Child name (e.g. 'atlas'), or None for the root logger

    Returns:
        Logger instance
    """
    if not name:
        return logging.getLogger(LOGGER_NAME)
    return logging.getLogger(f"{LOGGER_NAME}.{name}")


def setup_logging(log_file: Optional[Path] = None, verbose: bool = False) -> logging.Logger:
    """Configure file and console handlers on the zonegraph root logger.

    Calling it twice replaces the previous handlers instead of stacking them.

    Args:
        log_file: Optional path for the detailed DEBUG log
        verbose: Show INFO on the console instead of WARNING

    Returns:
        The configured root logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    if log_file is not None:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.INFO if verbose else logging.WARNING)
    console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logger.addHandler(console_handler)

    logger.debug("logging initialized (file=%s, verbose=%s)", log_file, verbose)
    return logger
