"""
Test for coordinate changes and the covariance of computed objects

Copyright (c) 2024.
"""

import logging
from unittest import TestCase

import numpy as np

from src.lib import transform as tr
from src.lib.curvtor import curvature_components, torsion_components
from src.lib.dtensor import liouville
from src.lib.errors import JacobianSingular, NotProductChange, ShapeMismatch
from src.lib.geometry import (JetSpace, berwald_connection, canonical_nlc,
                              christoffel_spatial, christoffel_time)
from src.lib.identities import deflection_tensors
from src.lib.randomized import (random_affine_change, random_connection,
                                random_metrics, random_nlc)
from src.lib.symexpr import HALF, SampleBox, add, exp, log_, mul, neg, power


def exp_change(space: JetSpace) -> tr.CoordChange:
    """t~ = exp(t), x~^i = exp(x^i)."""
    n = space.n
    return tr.change_of_coords(
        space, exp(space.t), [exp(space.x(i)) for i in range(n)],
        log_(space.t), [log_(space.x(i)) for i in range(n)])


def all_zero(space: JetSpace, arr) -> bool:
    return all(space.is_zero(e) for e in np.asarray(arr, dtype=object).flat)


class ChangeTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)

    def test_time_scaling(self):
        ch = tr.affine_time_change(self.space, 2)
        fiber = tr.transform_fiber(ch)
        self.assertEqual(mul(HALF, self.space.y(0)), fiber[0])
        self.assertEqual(mul(HALF, self.space.y(1)), fiber[1])

    def test_map_point(self):
        ch = tr.affine_time_change(self.space, 2)
        q = ch.map_point({"t": 0.5, "x1": 0.4, "x2": 0.6, "y1_1": 1.0,
                          "y1_2": -2.0})
        self.assertAlmostEqual(1.0, q["t"])
        self.assertAlmostEqual(0.4, q["x1"])
        self.assertAlmostEqual(0.5, q["y1_1"])
        self.assertAlmostEqual(-1.0, q["y1_2"])

    def test_sign_change(self):
        space = JetSpace.standard(1)
        box = SampleBox(ranges={"t": (-1.0, 1.0)})
        with self.assertRaises(JacobianSingular):
            tr.change_of_coords(space, power(space.t, 2), [space.x(0)],
                                space.t, [space.x(0)], box=box)

    def test_singular_spatial(self):
        space = self.space
        x1 = space.x(0)
        with self.assertRaises(JacobianSingular):
            tr.change_of_coords(space, space.t, [x1, x1], space.t, [x1, x1])

    def test_wrong_inverse(self):
        space = JetSpace.standard(1)
        with self.assertRaises(JacobianSingular):
            tr.change_of_coords(space, mul(2, space.t), [space.x(0)],
                                space.t, [space.x(0)])

    def test_not_product(self):
        space = self.space
        x1, x2, t = space.x(0), space.x(1), space.t
        with self.assertRaises(NotProductChange):
            tr.change_of_coords(space, t, [add(x1, t), x2], t,
                                [add(x1, neg(t)), x2])
        with self.assertRaises(NotProductChange):
            tr.change_of_coords(space, add(t, x1), [x1, x2], t, [x1, x2])
        with self.assertRaises(NotProductChange):
            tr.change_of_coords(space, t, [space.y(0), x2], t, [x1, x2])

    def test_shape(self):
        space = self.space
        with self.assertRaises(ShapeMismatch):
            tr.change_of_coords(space, space.t, [space.x(0)], space.t,
                                [space.x(0)])

    def test_jacobian(self):
        ch = exp_change(JetSpace.standard(1))
        self.assertEqual(exp(ch.space.t), ch.jacobian.dtdt_new)
        self.assertEqual(exp(ch.space.x(0)), ch.jacobian.J[0, 0])
        self.assertEqual(power(ch.space.x(0), -1), ch.jacobian.Jinv[0, 0])


class NonlinearConnectionTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(2)

    def test_identity(self):
        nlc = random_nlc(self.space, np.random.default_rng(41))
        moved = tr.transform_nlc(nlc, tr.identity_change(self.space))
        self.assertTrue(all_zero(self.space, tr._diff(nlc.M, moved.M)))
        self.assertTrue(all_zero(self.space, tr._diff(nlc.N, moved.N)))

    def test_canonical(self):
        rng = np.random.default_rng(42)
        h, phi = random_metrics(self.space, rng)
        ch = random_affine_change(self.space, rng)
        moved = tr.transform_nlc(canonical_nlc(h, phi), ch)
        direct = canonical_nlc(*tr.transform_metrics(h, phi, ch))
        self.assertTrue(all_zero(self.space, tr._diff(moved.M, direct.M)))
        self.assertTrue(all_zero(self.space, tr._diff(moved.N, direct.N)))

    def test_canonical_nonlinear(self):
        space = JetSpace.standard(1)
        rng = np.random.default_rng(43)
        h, phi = random_metrics(space, rng)
        ch = exp_change(space)
        moved = tr.transform_nlc(canonical_nlc(h, phi), ch)
        direct = canonical_nlc(*tr.transform_metrics(h, phi, ch))
        self.assertTrue(all_zero(space, tr._diff(moved.M, direct.M)))
        self.assertTrue(all_zero(space, tr._diff(moved.N, direct.N)))

    def test_composition(self):
        rng = np.random.default_rng(44)
        nlc = random_nlc(self.space, rng)
        first = random_affine_change(self.space, rng)
        second = random_affine_change(self.space, rng)
        twice = tr.transform_nlc(tr.transform_nlc(nlc, first), second)
        once = tr.transform_nlc(nlc, tr.compose(first, second))
        self.assertTrue(all_zero(self.space, tr._diff(twice.M, once.M)))
        self.assertTrue(all_zero(self.space, tr._diff(twice.N, once.N)))


class ConnectionTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_christoffel(self):
        space = JetSpace.standard(2)
        h, phi = random_metrics(space, np.random.default_rng(45))
        ch = exp_change(space)
        h_new, phi_new = tr.transform_metrics(h, phi, ch)
        self.assertTrue(space.is_zero(add(
            tr.transform_christoffel_time(christoffel_time(h), ch),
            neg(christoffel_time(h_new)))))
        moved = tr.transform_christoffel_spatial(christoffel_spatial(phi), ch)
        self.assertTrue(all_zero(space, tr._diff(
            moved, christoffel_spatial(phi_new))))

    def test_berwald(self):
        space = JetSpace.standard(2)
        rng = np.random.default_rng(46)
        h, phi = random_metrics(space, rng)
        ch = random_affine_change(space, rng)
        moved = tr.transform_connection(berwald_connection(h, phi), ch)
        direct = berwald_connection(*tr.transform_metrics(h, phi, ch))
        for name, diff in tr.connection_difference(moved, direct):
            self.assertTrue(all_zero(space, diff), name)

    def test_berwald_nonlinear(self):
        space = JetSpace.standard(1)
        h, phi = random_metrics(space, np.random.default_rng(47))
        ch = exp_change(space)
        moved = tr.transform_connection(berwald_connection(h, phi), ch)
        direct = berwald_connection(*tr.transform_metrics(h, phi, ch))
        for name, diff in tr.connection_difference(moved, direct):
            self.assertTrue(all_zero(space, diff), name)

    def test_liouville(self):
        space = JetSpace.standard(2)
        ch = random_affine_change(space, np.random.default_rng(48))
        moved = tr.transform_dtensor(liouville(space), ch)
        self.assertTrue(all_zero(space, tr._diff(
            moved.components, liouville(space).components)))


class CovarianceTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)
        cls.space = JetSpace.standard(1)
        rng = np.random.default_rng(49)
        cls.conn = random_connection(cls.space, rng, degree=1)
        cls.change = random_affine_change(cls.space, rng)

    def test_derivative(self):
        report = tr.covariance_check(liouville(self.space), self.conn,
                                     self.change, samples=8, seed=1)
        self.assertEqual(["covariance/derivative/hM",
                          "covariance/derivative/hR",
                          "covariance/derivative/v"],
                         [r.name for r in report])
        self.assertTrue(report.passed, [r.name for r in report.failed()])

    def test_torsion(self):
        report = tr.covariance_check(torsion_components(self.conn),
                                     self.conn, self.change, samples=8,
                                     seed=2)
        self.assertEqual(10, len(report))
        self.assertTrue(report.passed, [r.name for r in report.failed()])

    def test_curvature(self):
        report = tr.covariance_check(curvature_components(self.conn),
                                     self.conn, self.change, samples=8,
                                     seed=3)
        self.assertEqual(15, len(report))
        self.assertTrue(report.passed, [r.name for r in report.failed()])

    def test_deflection(self):
        report = tr.covariance_check(deflection_tensors(self.conn),
                                     self.conn, self.change, samples=8,
                                     seed=4)
        self.assertEqual(["covariance/deflection/D",
                          "covariance/deflection/Dbar",
                          "covariance/deflection/d"],
                         [r.name for r in report])
        self.assertTrue(report.passed, [r.name for r in report.failed()])

    def test_nonlinear_change(self):
        report = tr.covariance_check(torsion_components(self.conn),
                                     self.conn, exp_change(self.space),
                                     samples=8, seed=5)
        self.assertTrue(report.passed, [r.name for r in report.failed()])
