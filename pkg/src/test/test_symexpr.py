"""
Test for the symbolic expression core

Copyright (c) 2024.
"""

import logging
import math
from fractions import Fraction
from unittest import TestCase

from hypothesis import given, settings
from hypothesis import strategies as st

from src.lib import config
from src.lib import symexpr as sx
from src.lib.errors import (EvaluationSingularity, InputError,
                            MalformedExpression, UnboundVariable,
                            UnknownVariable)

VARS = ("t", "x1", "y1_1")
t, x, y = (sx.var(v) for v in VARS)


def _expressions() -> st.SearchStrategy:
    leaves = st.one_of(st.integers(-3, 3).map(sx.const),
                       st.sampled_from(VARS).map(sx.var))

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: sx.add(*p)),
            st.tuples(children, children).map(lambda p: sx.mul(*p)),
            st.tuples(children, st.integers(2, 3)).map(
                lambda p: sx.power(*p)),
            children.map(sx.sin),
            children.map(sx.cos),
            children.map(lambda e: sx.exp(sx.mul(sx.HALF, e))),
        )

    return st.recursive(leaves, extend, max_leaves=6)


POINT = {"t": 0.7, "x1": 0.45, "y1_1": -0.3}


class ConstructionTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_canonical_sum(self):
        self.assertEqual(sx.add(x, t, x), sx.add(sx.mul(2, x), t))
        self.assertEqual(sx.add(x, sx.neg(x)), sx.ZERO)
        self.assertTrue(sx.add(t, 1, -1, sx.neg(t)).is_literal_zero())

    def test_canonical_product(self):
        self.assertEqual(sx.mul(x, t), sx.mul(t, x))
        self.assertEqual(sx.mul(x, sx.power(x, -1)), sx.ONE)
        self.assertEqual(sx.mul(x, x, x), sx.power(x, 3))
        self.assertEqual(sx.mul(0, sx.sin(x)), sx.ZERO)

    def test_folding(self):
        self.assertEqual(sx.sin(0), sx.ZERO)
        self.assertEqual(sx.cos(0), sx.ONE)
        self.assertEqual(sx.exp(0), sx.ONE)
        self.assertEqual(sx.log_(1), sx.ZERO)

    def test_division_by_literal_zero(self):
        with self.assertRaises(EvaluationSingularity):
            sx.power(sx.ZERO, -1)

    def test_power_exponent(self):
        with self.assertRaises(MalformedExpression):
            sx.power(x, Fraction(1, 2))
        self.assertEqual(sx.power(x, 0), sx.ONE)

    def test_unknown_function(self):
        with self.assertRaises(UnknownVariable):
            sx.func("arcsin", x)

    def test_free_symbols(self):
        e = sx.add(sx.sin(x), sx.mul(t, y))
        self.assertEqual(e.free_symbols, frozenset(VARS))
        self.assertEqual(sx.const(5).free_symbols, frozenset())

    def test_operators(self):
        self.assertEqual(x + 1 - 1, x)
        self.assertEqual((x * t) / t, x)
        self.assertEqual(-(-x), x)
        self.assertEqual(x ** 2, sx.mul(x, x))
        self.assertEqual(1 - x, sx.add(1, sx.neg(x)))


class ParseRenderTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_parse(self):
        self.assertEqual(sx.parse("x1^2 + 2*x1 + 1", VARS),
                         sx.add(sx.power(x, 2), sx.mul(2, x), 1))
        self.assertEqual(sx.parse("sin(x1)^2", VARS),
                         sx.power(sx.sin(x), 2))
        self.assertEqual(sx.parse("-t^2", VARS), sx.neg(sx.power(t, 2)))
        self.assertEqual(sx.parse("-x1^2 + 2", VARS),
                         sx.add(sx.neg(sx.power(x, 2)), 2))
        self.assertEqual(sx.parse("(-t)^2", VARS), sx.power(t, 2))
        self.assertEqual(sx.parse("2*-t^2", VARS),
                         sx.mul(-2, sx.power(t, 2)))
        self.assertEqual(sx.parse("--t", VARS), t)
        self.assertEqual(sx.parse("t/2", VARS), sx.mul(sx.HALF, t))
        self.assertEqual(sx.parse("0.5*t", VARS), sx.mul(sx.HALF, t))

    def test_parse_errors(self):
        with self.assertRaises(MalformedExpression):
            sx.parse("x1 +", VARS)
        with self.assertRaises(MalformedExpression):
            sx.parse("", VARS)
        with self.assertRaises(MalformedExpression):
            sx.parse("x1^0.5", VARS)
        with self.assertRaises(MalformedExpression):
            sx.parse("1/0", VARS)
        with self.assertRaises(UnknownVariable):
            sx.parse("z + 1", VARS)
        with self.assertRaises(UnknownVariable):
            sx.parse("arcsin(x1)", VARS)
        # both are input errors
        with self.assertRaises(InputError):
            sx.parse("z", VARS)

    def test_render(self):
        self.assertEqual(sx.render(sx.ZERO), "0")
        self.assertEqual(sx.render(sx.const(Fraction(-3, 4))), "-3/4")
        self.assertEqual(sx.render(sx.neg(sx.power(t, 2))), "-t^2")
        self.assertEqual(sx.render(sx.mul(t, sx.power(x, -1))), "t/x1")

    def test_round_trip_corpus(self):
        corpus = ["0", "1", "-3/4", "exp(2*t)", "sin(x1)^2",
                  "-sin(x1)*cos(x1)", "cos(x1)/sin(x1)", "t^2 - 2*t + 1",
                  "x1*y1_1/(t^2 + 1)", "sqrt(t)", "log(x1) + exp(-t)",
                  "1/2*y1_1 - 1/3", "-t^3*x1^2", "1/(x1 + 1)"]
        for source in corpus:
            e = sx.parse(source, VARS)
            self.assertEqual(e, sx.parse(sx.render(e), VARS), source)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(_expressions())
    def test_round_trip(self, e):
        self.assertEqual(e, sx.parse(sx.render(e), VARS))


class DifferentiateTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_rules(self):
        self.assertEqual(sx.differentiate(sx.power(x, 3), "x1"),
                         sx.mul(3, sx.power(x, 2)))
        self.assertEqual(sx.differentiate(sx.sin(x), "x1"), sx.cos(x))
        self.assertEqual(sx.differentiate(sx.exp(sx.mul(2, t)), "t"),
                         sx.mul(2, sx.exp(sx.mul(2, t))))
        self.assertEqual(sx.differentiate(sx.mul(t, x), "y1_1"), sx.ZERO)
        self.assertEqual(sx.differentiate(sx.log_(x), "x1"),
                         sx.power(x, -1))

    def test_unknown_variable(self):
        with self.assertRaises(UnknownVariable):
            sx.differentiate(x, "z", VARS)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(_expressions(), st.sampled_from(VARS))
    def test_leibniz(self, e, v):
        f = sx.sin(x)
        lhs = sx.differentiate(sx.mul(e, f), v)
        rhs = sx.add(sx.mul(sx.differentiate(e, v), f),
                     sx.mul(e, sx.differentiate(f, v)))
        self.assertTrue(sx.is_zero(sx.add(lhs, sx.neg(rhs))))

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(_expressions(), st.sampled_from(VARS))
    def test_finite_differences(self, e, v):
        h = 1e-5
        d = sx.evaluate(sx.differentiate(e, v), POINT)
        up, down = dict(POINT), dict(POINT)
        up[v] += h
        down[v] -= h
        fd = (sx.evaluate(e, up) - sx.evaluate(e, down)) / (2 * h)
        _, scale = sx.evaluate_scaled(e, POINT)
        self.assertLessEqual(abs(fd - d), 1e-5 * (1 + abs(d) + scale))


class SimplifyTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_expand(self):
        e = sx.add(sx.power(sx.add(x, 1), 2),
                   sx.neg(sx.add(sx.power(x, 2), sx.mul(2, x), 1)))
        self.assertTrue(sx.simplify(e).is_literal_zero())

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(_expressions())
    def test_idempotent(self, e):
        once = sx.simplify(e)
        self.assertEqual(once, sx.simplify(once))

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(_expressions())
    def test_value_preserving(self, e):
        a, b = sx.evaluate(e, POINT), sx.evaluate(sx.simplify(e), POINT)
        self.assertTrue(math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9))

    def test_substitute(self):
        e = sx.add(sx.mul(t, x), y)
        s = sx.substitute(e, {"t": x, "x1": t})
        self.assertEqual(s, sx.add(sx.mul(t, x), y))
        self.assertEqual(sx.substitute(sx.sin(x), {"x1": sx.ZERO}), sx.ZERO)


class ZeroTest(TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        """Disable Logging"""
        logging.getLogger().setLevel(logging.FATAL)

    def test_symbolic(self):
        zc = sx.check_zero(sx.add(x, sx.neg(x)))
        self.assertTrue(zc.verdict)
        self.assertEqual("symbolic", zc.path)
        self.assertEqual(0, zc.samples)

    def test_numeric(self):
        e = sx.add(sx.power(sx.sin(x), 2), sx.power(sx.cos(x), 2), -1)
        zc = sx.check_zero(e, trials=16, seed=3)
        self.assertTrue(zc.verdict)
        self.assertEqual("numeric", zc.path)
        self.assertEqual(16, zc.samples)
        self.assertEqual(3, zc.seed)

    def test_nonzero(self):
        self.assertFalse(sx.is_zero(sx.sin(x)))
        zc = sx.check_zero(sx.const(2))
        self.assertFalse(zc.verdict)
        self.assertEqual(2.0, zc.max_residual)

    def test_deterministic(self):
        e = sx.add(sx.exp(t), sx.neg(sx.power(t, 2)))
        self.assertEqual(sx.check_zero(e, seed=7).max_residual,
                         sx.check_zero(e, seed=7).max_residual)

    def test_trials(self):
        with self.assertRaises(InputError):
            sx.check_zero(x, trials=0)

    def test_sample_box(self):
        box = sx.SampleBox(ranges={"x1": (2.0, 3.0)}, fixed={"t": 0.5})
        for p in sx.sample_points(("t", "x1"), 10, 0, box):
            self.assertEqual(0.5, p["t"])
            self.assertTrue(2.0 <= p["x1"] <= 3.0)

    def test_default_box(self):
        lo_y, hi_y = config.FIBER_BOX
        lo_t, hi_t = config.TIME_BOX
        lo_x, hi_x = config.SPACE_BOX
        points = sx.sample_points(("t", "x1", "y1_1"), 64, 5)
        for p in points:
            self.assertTrue(lo_y <= p["y1_1"] <= hi_y)
            self.assertTrue(lo_t <= p["t"] <= hi_t)
            self.assertTrue(lo_x <= p["x1"] <= hi_x)
        self.assertTrue(any(p["y1_1"] < 0 for p in points))

    def test_evaluate(self):
        self.assertAlmostEqual(math.exp(1.4),
                               sx.evaluate(sx.exp(sx.mul(2, t)), POINT))
        with self.assertRaises(UnboundVariable):
            sx.evaluate(x, {})
        with self.assertRaises(EvaluationSingularity):
            sx.evaluate(sx.log_(x), {"x1": -1.0})
        with self.assertRaises(EvaluationSingularity):
            sx.evaluate(sx.power(x, -1), {"x1": 0.0})
