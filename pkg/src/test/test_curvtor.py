"""
Test for torsion and curvature families

Copyright (c) 2024.
"""

import itertools
import logging
from unittest import TestCase

import numpy as np

from src.lib import curvtor as ct
from src.lib.geometry import (GammaConnection, JetSpace, Kind, SpatialMetric,
                              TimeMetric, berwald_connection, spatial_riemann)
from src.lib.randomized import random_connection, random_metrics
from src.lib.symexpr import ONE, ZERO, add, exp, mul, neg, power, sin

T, S, V = Kind.TIME, Kind.SPACE, Kind.VERTICAL


def sphere_berwald(space: JetSpace):
    x1 = space.x(0)
    phi = SpatialMetric(space, np.array(
        [[ONE, ZERO], [ZERO, power(sin(x1), 2)]], dtype=object))
    h = TimeMetric(space, exp(mul(2, space.t)))
    return berwald_connection(h, phi), phi


class TorsionTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)

    def test_shapes(self):
        ts = ct.torsion_components(GammaConnection.zero(self.space))
        self.assertEqual(10, len(ts.families()))
        self.assertEqual((1, 1, 2), ts.Tbar1j.components.shape)
        self.assertEqual((2, 1, 2), ts.R1j.components.shape)
        self.assertEqual((2, 2, 2), ts.S.components.shape)

    def test_berwald(self):
        conn, _ = sphere_berwald(self.space)
        ts = ct.torsion_components(conn)
        for name, T_ in ts.families().items():
            if name == "Rij":
                continue
            for e in T_.components.flat:
                self.assertTrue(self.space.is_zero(e), name)
        # Rij carries the curvature of the base
        self.assertFalse(self.space.is_zero(ts.Rij.components[0, 0, 1]))

    def test_antisymmetric(self):
        conn = random_connection(self.space, np.random.default_rng(7))
        ts = ct.torsion_components(conn)
        for name in ("Tij", "Rij", "S"):
            arr = ts.families()[name].components
            for r in range(2):
                self.assertTrue(arr[r, 0, 0].is_literal_zero())
                self.assertEqual(arr[r, 0, 1], neg(arr[r, 1, 0]))

    def test_lookup(self):
        conn = random_connection(self.space, np.random.default_rng(8))
        ts = ct.torsion_components(conn)
        swapped = ct.torsion_lookup(ts, V, S, T)
        self.assertEqual((2, 2, 1), swapped.shape)
        self.assertEqual(neg(ts.R1j.components[1, 0, 0]), swapped[1, 0, 0])
        self.assertTrue(all(e.is_literal_zero()
                            for e in ct.torsion_lookup(ts, T, T, T).flat))
        self.assertTrue(all(e.is_literal_zero()
                            for e in ct.torsion_lookup(ts, T, S, S).flat))

    def test_definition(self):
        for n, seed in ((1, 21), (2, 22)):
            space = JetSpace.standard(n)
            conn = random_connection(space, np.random.default_rng(seed),
                                     degree=1)
            explicit = ct.torsion_components(conn).families()
            defined = ct.torsion_from_definition(conn).families()
            for name in explicit:
                for a, b in zip(explicit[name].components.flat,
                                defined[name].components.flat):
                    self.assertTrue(space.is_zero(add(a, neg(b))),
                                    f"{name} n={n}")

    def test_definition_random(self):
        space = self.space
        rng = np.random.default_rng(31)
        for k in range(10):
            conn = random_connection(space, rng, degree=2)
            explicit = ct.torsion_components(conn).families()
            defined = ct.torsion_from_definition(conn).families()
            for name in explicit:
                for a, b in zip(explicit[name].components.flat,
                                defined[name].components.flat):
                    self.assertTrue(space.is_zero(add(a, neg(b)), trials=16),
                                    f"{name} k={k}")

    def test_berwald_random_metrics(self):
        space = self.space
        rng = np.random.default_rng(32)
        for k in range(5):
            h, phi = random_metrics(space, rng)
            ts = ct.torsion_components(berwald_connection(h, phi))
            for name, T_ in ts.families().items():
                if name == "Rij":
                    continue
                for e in T_.components.flat:
                    self.assertTrue(space.is_zero(e), f"{name} k={k}")
            # R_(1)ij^(l) = r^l_mij y_m
            r = spatial_riemann(phi)
            for l, i, j in itertools.product(range(2), repeat=3):
                expected = add(*(mul(r[l, m, i, j], space.y(m))
                                 for m in range(2)))
                self.assertTrue(space.is_zero(
                    add(ts.Rij.components[l, i, j], neg(expected))),
                    f"k={k} {(l, i, j)}")


class CurvatureTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)

    def test_shapes(self):
        cs = ct.curvature_components(GammaConnection.zero(self.space))
        self.assertEqual(15, len(cs.families()))
        self.assertEqual((1, 1, 1, 2), cs.Rbar11k.components.shape)
        self.assertEqual((2, 2, 2, 2), cs.Rlijk.components.shape)
        self.assertEqual((2, 2, 1, 2), cs.Pv11k.components.shape)

    def test_berwald_sphere(self):
        conn, phi = sphere_berwald(self.space)
        cs = ct.curvature_components(conn)
        r = spatial_riemann(phi)
        for idx in np.ndindex(r.shape):
            self.assertTrue(self.space.is_zero(
                add(cs.Rlijk.components[idx], neg(r[idx]))), idx)
            self.assertTrue(self.space.is_zero(
                add(cs.Rvjk.components[idx], neg(r[idx]))), idx)
        self.assertFalse(self.space.is_zero(cs.Rvjk.components[0, 1, 0, 1]))
        for name in ("Rbar11k", "Ril1k", "Rv1", "Rbar1jk", "Pbar11k",
                     "Pli1k", "Pv11k", "Pbar1jk", "Plijk", "Pvjk", "Sbar1jk",
                     "Slijk", "Svijk"):
            for e in cs.families()[name].components.flat:
                self.assertTrue(self.space.is_zero(e), name)

    def test_antisymmetric(self):
        conn = random_connection(self.space, np.random.default_rng(9))
        cs = ct.curvature_components(conn)
        for name in ("Rbar1jk", "Rlijk", "Rvjk", "Sbar1jk", "Slijk",
                     "Svijk"):
            arr = cs.families()[name].components
            for idx in np.ndindex(arr.shape[:2]):
                self.assertTrue(arr[idx + (0, 0)].is_literal_zero())
                self.assertEqual(arr[idx + (0, 1)], neg(arr[idx + (1, 0)]))

    def test_lookup(self):
        conn = random_connection(self.space, np.random.default_rng(10))
        cs = ct.curvature_components(conn)
        swapped = ct.curvature_lookup(cs, V, V, T)
        self.assertEqual((2, 2, 2, 1), swapped.shape)
        self.assertEqual(neg(cs.Pv11k.components[0, 1, 0, 1]),
                         swapped[0, 1, 1, 0])
        self.assertTrue(all(e.is_literal_zero()
                            for e in ct.curvature_lookup(cs, S, T, T).flat))

    def test_definition(self):
        space = JetSpace.standard(1)
        conn = random_connection(space, np.random.default_rng(23), degree=1)
        explicit = ct.curvature_components(conn).families()
        defined = ct.curvature_from_definition(conn).families()
        for name in explicit:
            for a, b in zip(explicit[name].components.flat,
                            defined[name].components.flat):
                self.assertTrue(space.is_zero(add(a, neg(b))), name)

    def test_definition_random(self):
        space = self.space
        rng = np.random.default_rng(33)
        for k in range(10):
            conn = random_connection(space, rng, degree=2)
            explicit = ct.curvature_components(conn).families()
            defined = ct.curvature_from_definition(conn).families()
            for name in explicit:
                for a, b in zip(explicit[name].components.flat,
                                defined[name].components.flat):
                    self.assertTrue(space.is_zero(add(a, neg(b)), trials=16),
                                    f"{name} k={k}")

    def test_berwald_random_metrics(self):
        space = self.space
        rng = np.random.default_rng(34)
        for k in range(5):
            h, phi = random_metrics(space, rng)
            cs = ct.curvature_components(berwald_connection(h, phi))
            r = spatial_riemann(phi)
            for name, R in cs.families().items():
                if name in ("Rlijk", "Rvjk"):
                    for idx in np.ndindex(r.shape):
                        self.assertTrue(space.is_zero(
                            add(R.components[idx], neg(r[idx]))),
                            f"{name} k={k} {idx}")
                    continue
                for e in R.components.flat:
                    self.assertTrue(space.is_zero(e), f"{name} k={k}")
