"""Logging configuration with colored console output."""
import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import colorlog

LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}


def _level(name: str) -> int:
    level = logging.getLevelName(name.upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {name!r}")
    return level


def setup_logger(name: str = "klt_approx", log_level: str = None) -> logging.Logger:
    """
    Logger with a colored stderr handler and, unless LOG_FILE is empty, a file handler.

    stdout is left to command output (CSV, JSON, verification results).
    """
    from src.utils.config import Config

    logger = logging.getLogger(name)
    logger.setLevel(_level(log_level or Config.LOG_LEVEL))
    logger.propagate = False

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    console_handler = colorlog.StreamHandler(sys.stderr)
    console_handler.setFormatter(colorlog.ColoredFormatter(
        "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        log_colors=LOG_COLORS,
    ))
    logger.addHandler(console_handler)

    if Config.LOG_FILE:
        log_file = Path(Config.LOG_FILE)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        ))
        logger.addHandler(file_handler)

    return logger


def set_level(log_level: str):
    """Change the level of every logger created by setup_logger."""
    level = _level(log_level)
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.handlers:
            logger.setLevel(level)


@contextmanager
def log_duration(logger: logging.Logger, label: str):
    """Log the wall time of a block at INFO."""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.info(f"{label} took {time.perf_counter() - start:.2f}s")
