"""
General configurations

Copyright (c) 2024.
"""

import logging
import os


# GENERAL----------------------------------------------------------------------
DEBUG = False
SHOW_PROGRESS = False
# -----------------------------------------------------------------------------
# VERIFICATION SETTINGS--------------------------------------------------------
TOLERANCE = 1e-9
DEFAULT_SAMPLES = 32
MAX_RESAMPLES = 8
SEED_ENV = "JETGEO_SEED"
try:
    DEFAULT_SEED = int(os.environ.get(SEED_ENV, "0"))
except ValueError:
    DEFAULT_SEED = 0
# Sample box of the jet space, bounds are inclusive-exclusive.
TIME_BOX = (0.3, 1.2)
SPACE_BOX = (0.3, 1.2)
FIBER_BOX = (-1.0, 1.0)
JACOBIAN_EPS = 1e-9
# -----------------------------------------------------------------------------
# JET SPACE SETTINGS-----------------------------------------------------------
MAX_DIMENSION = 4
TIME_NAME = "t"
SPACE_PREFIX = "x"
FIBER_PREFIX = "y1_"
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")
# -----------------------------------------------------------------------------
# DIRECTORY STRUCTURE----------------------------------------------------------
_cur_dir = os.path.dirname(
    os.path.dirname(
        os.path.dirname(os.path.abspath(__file__))))
WORKING_DIR = os.path.abspath(_cur_dir) + '/'
DATA_DIR = WORKING_DIR + 'data/'
LOG_DIR = DATA_DIR + 'logs/'
# -----------------------------------------------------------------------------
# LOGGING----------------------------------------------------------------------
LOGLEVEL = logging.DEBUG if DEBUG else logging.INFO
CLI_LOGFILE = "jetgeo.log"
LOGLEVEL_ENV = "JETGEO_LOGLEVEL"
# -----------------------------------------------------------------------------
