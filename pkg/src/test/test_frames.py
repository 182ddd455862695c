"""
Test for the adapted frame and its brackets

Copyright (c) 2024.
"""

import logging
from unittest import TestCase

import numpy as np

from src.lib import frames
from src.lib.errors import IndexOutOfRange
from src.lib.geometry import JetSpace, Kind, NonlinearConnection
from src.lib.randomized import random_function, random_nlc
from src.lib.symexpr import ONE, ZERO, cos, is_zero, mul, neg, sin


class FrameOpTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)
        cls.nlc = random_nlc(cls.space, np.random.default_rng(11))

    def test_index_range(self):
        with self.assertRaises(IndexOutOfRange):
            frames.space_op(self.nlc, 2)
        with self.assertRaises(IndexOutOfRange):
            frames.vertical_op(self.nlc, -1)
        with self.assertRaises(IndexOutOfRange):
            frames.FrameOp(Kind.TIME, 1, self.nlc)

    def test_str(self):
        self.assertEqual("d/dt", str(frames.time_op(self.nlc)))
        self.assertEqual("d/dx2", str(frames.space_op(self.nlc, 1)))
        self.assertEqual("d/dy1_1", str(frames.vertical_op(self.nlc, 0)))

    def test_on_coordinates(self):
        space, nlc = self.space, self.nlc
        self.assertEqual(ONE, frames.apply_frame(frames.time_op(nlc),
                                                 space.t))
        self.assertEqual(ZERO, frames.apply_frame(frames.space_op(nlc, 0),
                                                  space.x(1)))
        self.assertEqual(ONE, frames.apply_frame(frames.vertical_op(nlc, 1),
                                                 space.y(1)))
        self.assertEqual(neg(nlc.M[1]),
                         frames.apply_frame(frames.time_op(nlc), space.y(1)))
        self.assertEqual(neg(nlc.N[0, 1]),
                         frames.apply_frame(frames.space_op(nlc, 1),
                                            space.y(0)))

    def test_chain(self):
        space, nlc = self.space, self.nlc
        u = mul(space.x(0), space.y(0))
        d = frames.apply_frame(frames.vertical_op(nlc, 0), sin(u))
        self.assertTrue(is_zero(d - mul(space.x(0), cos(u))))
        d = frames.apply_frame(frames.time_op(nlc), sin(u))
        self.assertTrue(is_zero(d + mul(nlc.M[0], space.x(0), cos(u))))


class BracketTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_flat(self):
        space = JetSpace.standard(2)
        nlc = NonlinearConnection.zero(space)
        R1, Rij = frames.bracket_tensors(nlc)
        self.assertTrue(all(e.is_literal_zero() for e in R1.flat))
        self.assertTrue(all(e.is_literal_zero() for e in Rij.flat))

    def test_antisymmetric(self):
        space = JetSpace.standard(3)
        nlc = random_nlc(space, np.random.default_rng(5))
        _, Rij = frames.bracket_tensors(nlc)
        for r in range(3):
            for i in range(3):
                self.assertTrue(Rij[r, i, i].is_literal_zero())
                for j in range(3):
                    self.assertEqual(Rij[r, i, j], neg(Rij[r, j, i]))

    def test_residuals_vanish(self):
        for n, seed in ((1, 2), (2, 3), (2, 4)):
            space = JetSpace.standard(n)
            rng = np.random.default_rng(seed)
            nlc = random_nlc(space, rng)
            f = random_function(space, rng)
            residuals = frames.bracket_residuals(nlc, f)
            for name, r in residuals:
                self.assertTrue(space.is_zero(r), name)

    def test_residuals_vanish_many(self):
        space = JetSpace.standard(2)
        rng = np.random.default_rng(6)
        for k in range(5):
            nlc = random_nlc(space, rng)
            for m in range(50):
                f = random_function(space, rng)
                for name, r in frames.bracket_residuals(nlc, f):
                    self.assertTrue(space.is_zero(r), f"{name} k={k} m={m}")

    def test_residual_count(self):
        space = JetSpace.standard(2)
        nlc = NonlinearConnection.zero(space)
        # [t,t], 2 n for time, n^2 twice and n(n-1)/2 spatial pairs
        self.assertEqual(1 + 4 + 8 + 1,
                         len(frames.bracket_residuals(nlc, space.t)))
