# coding: utf8
"""This module contains the common preconfigured logger used by every module.

Records go to an in-memory stream so that a command can hand its warnings back
together with its result. The command line adds a console handler on demand.
"""
import io
import logging

LOG_FORMAT = "{levelname} {asctime} [{funcName}] {message}"
LOG_STREAM = io.StringIO()

logger = logging.getLogger("ellipsoid_spectrum")
if not logger.handlers:
    _stream_handler = logging.StreamHandler(LOG_STREAM)
    _stream_handler.setFormatter(logging.Formatter(LOG_FORMAT, style="{"))
    logger.addHandler(_stream_handler)
    logger.setLevel(logging.WARNING)


def add_console_handler(level: int = logging.INFO, stream=None) -> logging.Handler:
    """Mirror log records to stderr (or the given stream) from `level` upward"""
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, style="{"))
    handler.setLevel(level)
    logger.addHandler(handler)
    logger.setLevel(min(logger.level, level))
    return handler


def reset_log_stream() -> None:
    LOG_STREAM.seek(0)
    LOG_STREAM.truncate(0)
