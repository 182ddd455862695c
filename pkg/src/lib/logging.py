"""
Logging setup of jetgeo

Console records go to stderr in color when stderr is a terminal, stdout is
reserved for reports. The level can be overridden with JETGEO_LOGLEVEL.

Copyright (c) 2024.
"""

import copy
import logging
import os
import sys

from src.lib import config

BLACK, RED, GREEN, YELLOW, BLUE, MAGENTA, CYAN, WHITE = range(8)

RESET_SEQ = "\033[0m"
COLOR_SEQ = "\033[1;%dm"
BOLD_SEQ = "\033[1m"

LEVEL_COLORS = {
    'DEBUG': BLUE,
    'INFO': WHITE,
    'WARNING': YELLOW,
    'ERROR': RED,
    'CRITICAL': MAGENTA,
}

CONSOLE_FORMAT = "[%(asctime)s][%(levelname)-18s][$BOLD%(name)-22s$RESET]  " \
                 "%(message)s"
FILE_FORMAT = "[%(asctime)s][%(levelname)-7s][%(name)-22s]  " \
              "%(message)s (%(filename)s:%(lineno)d)"


class ColoredFormatter(logging.Formatter):
    """Console formatter, colors only the level name and the message."""

    def __init__(self, use_color: bool = True) -> None:
        bold, reset = (BOLD_SEQ, RESET_SEQ) if use_color else ("", "")
        super().__init__(CONSOLE_FORMAT.replace("$BOLD", bold)
                         .replace("$RESET", reset))
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_color or record.levelname not in LEVEL_COLORS:
            return super().format(record)
        record = copy.copy(record)
        color = COLOR_SEQ % (30 + LEVEL_COLORS[record.levelname])
        record.msg = color + str(record.msg) + RESET_SEQ
        record.levelname = color + record.levelname + RESET_SEQ
        return super().format(record)


def level_from_env(default: int) -> int:
    """
    Log level named by the JETGEO_LOGLEVEL environment variable.

    :param default: Level if the variable is unset or unknown
    :return: Numeric logging level
    """
    name = os.environ.get(config.LOGLEVEL_ENV, "").strip().upper()
    level = logging.getLevelName(name) if name else None
    return level if isinstance(level, int) else default


def configure_root_logger(logging_level: int,
                          file: str | None = None) -> logging.Logger:
    """
    Replace the root handlers by a stderr console handler and, optionally,
    a file handler.

    :param logging_level: Level unless JETGEO_LOGLEVEL overrides it
    :param file: [optional] Log file, its directory is created
    :return: Root logger
    """
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    root.setLevel(level_from_env(logging_level))
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(ColoredFormatter(use_color=sys.stderr.isatty()))
    root.addHandler(console)
    if file is not None:
        os.makedirs(os.path.dirname(file), exist_ok=True)
        handler = logging.FileHandler(file)
        handler.setFormatter(logging.Formatter(FILE_FORMAT))
        root.addHandler(handler)
    return root
