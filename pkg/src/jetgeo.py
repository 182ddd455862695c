#!/usr/bin/env python3
"""
Entry point of the jetgeo command line tool

Copyright (c) 2024.
"""

import sys

from src.lib import cli, config
from src.lib.logging import configure_root_logger

if __name__ == '__main__':  # pragma no cover
    configure_root_logger(config.LOGLEVEL, config.LOG_DIR + config.CLI_LOGFILE)
    sys.exit(cli.main(sys.argv[1:]))
