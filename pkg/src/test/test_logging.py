"""
Test for the logging setup

Copyright (c) 2024.
"""

import logging
import os
import tempfile
from unittest import TestCase
from unittest.mock import patch

from src.lib import logging as jl


class LoggingTest(TestCase):

    def setUp(self) -> None:
        root = logging.getLogger()
        self.handlers = list(root.handlers)
        self.level = root.level

    def tearDown(self) -> None:
        root = logging.getLogger()
        for h in list(root.handlers):
            root.removeHandler(h)
            h.close()
        for h in self.handlers:
            root.addHandler(h)
        root.setLevel(self.level)

    def test_level_from_env(self):
        with patch.dict(os.environ, {"JETGEO_LOGLEVEL": "warning"}):
            self.assertEqual(logging.WARNING, jl.level_from_env(logging.INFO))
        with patch.dict(os.environ, {"JETGEO_LOGLEVEL": "chatty"}):
            self.assertEqual(logging.INFO, jl.level_from_env(logging.INFO))
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(logging.DEBUG, jl.level_from_env(logging.DEBUG))

    def test_formatter(self):
        record = logging.LogRecord("jetgeo", logging.ERROR, __file__, 1,
                                   "broken", None, None)
        plain = jl.ColoredFormatter(use_color=False).format(record)
        self.assertIn("broken", plain)
        self.assertNotIn("\033[", plain)
        colored = jl.ColoredFormatter(use_color=True).format(record)
        self.assertIn(jl.COLOR_SEQ % (30 + jl.RED) + "broken", colored)
        # the original record is left untouched
        self.assertEqual("broken", record.msg)

    def test_configure(self):
        with tempfile.TemporaryDirectory() as tmp:
            file = os.path.join(tmp, "logs", "jetgeo.log")
            with patch.dict(os.environ, {}, clear=True):
                root = jl.configure_root_logger(logging.INFO, file)
            self.assertEqual(logging.INFO, root.level)
            self.assertEqual(2, len(root.handlers))
            logging.getLogger("src.lib.cli").info("hello")
            for h in root.handlers:
                h.flush()
            with open(file, "r") as fd:
                self.assertIn("hello", fd.read())
            for h in list(root.handlers):
                root.removeHandler(h)
                h.close()
