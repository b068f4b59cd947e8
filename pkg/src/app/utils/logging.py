import logging
import sys
from typing import Any, Dict

import numpy as np
from pythonjsonlogger.json import JsonFormatter

from .settings import SETTINGS


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return _to_plain(value.tolist())
    return str(value)


def _to_plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    if isinstance(value, (np.ndarray, np.generic, complex)):
        return _json_default(value)
    return value


class NumericJsonFormatter(JsonFormatter):
    """JSON formatter that turns numpy scalars, arrays and complex numbers into plain JSON."""

    def process_log_record(self, log_record: Dict[str, Any]) -> Dict[str, Any]:
        for key, value in list(log_record.items()):
            log_record[key] = _to_plain(value)
        return super().process_log_record(log_record)


def setup_logging():
    default_logger = logging.getLogger()
    default_logger.setLevel(SETTINGS.logging_level)

    logger = logging.getLogger(SETTINGS.app_name)
    logger.setLevel(SETTINGS.app_logging_level)

    formatter = NumericJsonFormatter(
        fmt='%(levelname)s %(asctime)s %(name)s %(funcName)s %(lineno)d %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        json_default=_json_default
    )

    # stdout carries command output, so logs go to stderr
    if not logger.handlers:
        log_handler = logging.StreamHandler(sys.stderr)
        log_handler.setFormatter(formatter)
        logger.addHandler(log_handler)

    # Prevent duplicate logs
    logger.propagate = False

    return logger

logger = setup_logging()
