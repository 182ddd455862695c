"""
Test for the random object generators

Copyright (c) 2024.
"""

import logging
from unittest import TestCase

import numpy as np

from src.lib import randomized as rnd
from src.lib.geometry import BLOCK_NAMES, JetSpace, block_shape, determinant
from src.lib.symexpr import evaluate


class RandomizedTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)

    def test_poly(self):
        names = self.space.coordinates
        e = rnd.random_poly(names, np.random.default_rng(1))
        self.assertLessEqual(e.free_symbols, set(names))
        self.assertFalse(e.is_literal_zero())

    def test_deterministic(self):
        a = rnd.random_connection(self.space, np.random.default_rng(7))
        b = rnd.random_connection(self.space, np.random.default_rng(7))
        for name in BLOCK_NAMES:
            self.assertTrue((np.asarray(a.blocks()[name])
                             == np.asarray(b.blocks()[name])).all(), name)

    def test_connection_shapes(self):
        conn = rnd.random_connection(self.space, np.random.default_rng(2))
        for name, block in conn.blocks().items():
            self.assertEqual(block_shape(name, 2), np.shape(block), name)
        self.assertEqual((2, 2), conn.nlc.N.shape)

    def test_metrics(self):
        h, phi = rnd.random_metrics(self.space, np.random.default_rng(3))
        det = determinant(phi.phi)
        drawn = self.space.sample_box().draw(self.space.coordinates,
                                             np.random.default_rng(0))
        for p in (drawn, {"t": 1.2, "x1": 1.2, "x2": 0.3}):
            self.assertGreater(evaluate(h.h11, p), 0.0)
            self.assertGreater(evaluate(det, p), 0.0)

    def test_affine_change(self):
        for seed in range(5):
            ch = rnd.random_affine_change(self.space,
                                          np.random.default_rng(seed))
            self.assertTrue(all(e.is_literal_zero()
                                for e in ch.jacobian.hessian.flat))
            self.assertEqual(set(), ch.jacobian.dtdt_new.free_symbols)

    def test_function(self):
        f = rnd.random_function(self.space, np.random.default_rng(4))
        self.assertTrue(f.free_symbols)
