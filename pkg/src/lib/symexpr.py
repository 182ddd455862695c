"""
Symbolic expression core

Immutable expression trees over the jet coordinates (t, x, y) with exact
rational constants. Construction always returns the canonical form:
sums and products are flattened, like terms and like factors are
collected and constants are folded. simplify() additionally distributes
products over sums, so polynomial identities collapse to a literal 0.
Everything else is decided numerically by is_zero().

Copyright (c) 2024.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pyparsing as pp

from src.lib import config
from src.lib.errors import (EvaluationSingularity, InputError,
                            MalformedExpression, SampleExhausted,
                            UnboundVariable, UnknownVariable)

log: logging.Logger = logging.getLogger(__name__)

Point = dict[str, float]

# Ranks of the node types in the total order.
_NUMBER, _SYMBOL, _FUNC, _MUL, _ADD = range(5)


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ("_key", "_hash", "_free")

    def _init(self, key: tuple, free: frozenset[str]) -> None:
        self._key = key
        self._hash = hash(key)
        self._free = free

    @property
    def free_symbols(self) -> frozenset[str]:
        """Names of all variables the expression depends on."""
        return self._free

    def is_literal_zero(self) -> bool:
        return isinstance(self, Number) and self.value == 0

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if isinstance(other, (int, Fraction)):
            other = Number(Fraction(other))
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Expr) -> bool:
        return self._key < other._key

    def __add__(self, other) -> Expr:
        return add(self, other)

    def __radd__(self, other) -> Expr:
        return add(other, self)

    def __sub__(self, other) -> Expr:
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other) -> Expr:
        return add(other, neg(self))

    def __mul__(self, other) -> Expr:
        return mul(self, other)

    def __rmul__(self, other) -> Expr:
        return mul(other, self)

    def __truediv__(self, other) -> Expr:
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other) -> Expr:
        return mul(other, power(self, -1))

    def __neg__(self) -> Expr:
        return neg(self)

    def __pow__(self, n: int) -> Expr:
        return power(self, n)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Expr({render(self)})"


class Number(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Fraction) -> None:
        self.value = Fraction(value)
        self._init((_NUMBER, self.value), frozenset())


class Symbol(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name
        self._init((_SYMBOL, name), frozenset((name,)))


class Func(Expr):
    """Application of one of the elementary functions in config.FUNCTIONS."""

    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr) -> None:
        self.name = name
        self.arg = arg
        self._init((_FUNC, name, arg), arg.free_symbols)


class Mul(Expr):
    """Product of bases raised to nonzero integer exponents, coefficient 1."""

    __slots__ = ("factors",)

    def __init__(self, factors: tuple[tuple[Expr, int], ...]) -> None:
        self.factors = factors
        self._init((_MUL, factors),
                   frozenset().union(*(b.free_symbols for b, _ in factors)))


class Add(Expr):
    """Rational constant plus a sum of scaled terms."""

    __slots__ = ("const", "terms")

    def __init__(self, const: Fraction,
                 terms: tuple[tuple[Expr, Fraction], ...]) -> None:
        self.const = const
        self.terms = terms
        self._init((_ADD, const, terms),
                   frozenset().union(*(t.free_symbols for t, _ in terms)))


ZERO = Number(Fraction(0))
ONE = Number(Fraction(1))
MINUS_ONE = Number(Fraction(-1))
HALF = Number(Fraction(1, 2))


# CONSTRUCTION-----------------------------------------------------------------

def as_expr(x) -> Expr:
    """Convert ints, Fractions and numeric strings into expressions."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Number(Fraction(x))
    raise TypeError(f"Cannot convert {type(x).__name__} to an expression.")


def const(value: int | Fraction | str) -> Number:
    return Number(Fraction(value))


def var(name: str) -> Symbol:
    return Symbol(name)


def _build_add(constant: Fraction, terms: Mapping[Expr, Fraction]) -> Expr:
    items = sorted((t, c) for t, c in terms.items() if c != 0)
    if not items:
        return Number(constant)
    if constant == 0 and len(items) == 1 and items[0][1] == 1:
        return items[0][0]
    return Add(Fraction(constant), tuple(items))


def add(*args) -> Expr:
    """Canonical sum of the arguments."""
    constant = Fraction(0)
    terms: dict[Expr, Fraction] = {}
    for a in args:
        a = as_expr(a)
        if isinstance(a, Number):
            constant += a.value
        elif isinstance(a, Add):
            constant += a.const
            for t, c in a.terms:
                terms[t] = terms.get(t, Fraction(0)) + c
        else:
            terms[a] = terms.get(a, Fraction(0)) + 1
    return _build_add(constant, terms)


def _scale(a: Add, k: Fraction) -> Expr:
    if k == 0:
        return ZERO
    if k == 1:
        return a
    return Add(a.const * k, tuple((t, c * k) for t, c in a.terms))


def _collect(base: Expr, n: int, factors: dict[Expr, int]) -> Fraction:
    """Merge base^n into factors, return the numeric coefficient split off."""
    if isinstance(base, Number):
        if base.value == 0 and n < 0:
            raise EvaluationSingularity("Division by zero.")
        return base.value ** n
    if isinstance(base, Mul):
        for b, e in base.factors:
            factors[b] = factors.get(b, 0) + e * n
        return Fraction(1)
    if isinstance(base, Add):
        if base.const == 0 and len(base.terms) == 1:
            t, c = base.terms[0]
            return c ** n * _collect(t, n, factors)
        # Sums enter products with leading coefficient 1.
        k = base.terms[0][1]
        normalized = _scale(base, 1 / k)
        factors[normalized] = factors.get(normalized, 0) + n
        return k ** n
    factors[base] = factors.get(base, 0) + n
    return Fraction(1)


def _product(pairs: Iterable[tuple[Expr, int]]) -> Expr:
    coeff = Fraction(1)
    factors: dict[Expr, int] = {}
    for base, n in pairs:
        coeff *= _collect(as_expr(base), n, factors)
    if coeff == 0:
        return ZERO
    items = sorted((b, e) for b, e in factors.items() if e != 0)
    if not items:
        return Number(coeff)
    if len(items) == 1 and items[0][1] == 1:
        core = items[0][0]
    else:
        core = Mul(tuple(items))
    if isinstance(core, Add):
        return _scale(core, coeff)
    if coeff == 1:
        return core
    return Add(Fraction(0), ((core, coeff),))


def mul(*args) -> Expr:
    """Canonical product of the arguments."""
    return _product((a, 1) for a in args)


def power(base, n: int) -> Expr:
    """Canonical integer power."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise MalformedExpression(f"Exponent {n!r} is not an integer.")
    base = as_expr(base)
    if n == 0:
        return ONE
    if n == 1:
        return base
    return _product(((base, n),))


def neg(e) -> Expr:
    return mul(MINUS_ONE, e)


_FOLDED = {
    ("sin", 0): 0, ("cos", 0): 1, ("tan", 0): 0, ("exp", 0): 1,
    ("log", 1): 0, ("sqrt", 0): 0, ("sqrt", 1): 1, ("sinh", 0): 0,
    ("cosh", 0): 1,
}


def func(name: str, arg) -> Expr:
    """Canonical function application."""
    if name not in config.FUNCTIONS:
        raise UnknownVariable(f"Unknown function '{name}'.")
    arg = as_expr(arg)
    if isinstance(arg, Number) and (name, arg.value) in _FOLDED:
        return Number(Fraction(_FOLDED[(name, arg.value)]))
    return Func(name, arg)


def sin(e) -> Expr:
    return func("sin", e)


def cos(e) -> Expr:
    return func("cos", e)


def exp(e) -> Expr:
    return func("exp", e)


def log_(e) -> Expr:
    return func("log", e)


# PARSING----------------------------------------------------------------------

def _fold_product(tokens) -> Expr:
    result = tokens[0]
    for i in range(1, len(tokens), 2):
        if tokens[i] == "*":
            result = mul(result, tokens[i + 1])
        else:
            result = mul(result, power(tokens[i + 1], -1))
    return result


def _fold_sum(tokens) -> Expr:
    result = tokens[0]
    for i in range(1, len(tokens), 2):
        if tokens[i] == "+":
            result = add(result, tokens[i + 1])
        else:
            result = add(result, neg(tokens[i + 1]))
    return result


def _call(tokens) -> Expr:
    name, arg = tokens[0], tokens[1]
    if name not in config.FUNCTIONS:
        raise UnknownVariable(f"'{name}' is neither a variable nor a "
                              f"known function.")
    return func(name, arg)


def _build_grammar() -> pp.ParserElement:
    """
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ('^' integer)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

    Unary minus binds looser than '^': -x^2 is -(x^2).
    """
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    number = pp.Regex(r"\d+(\.\d*)?|\.\d+")
    number.set_parse_action(lambda t: Number(Fraction(t[0])))
    integer = pp.Regex(r"[+-]?\d+")
    integer.set_parse_action(lambda t: int(t[0]))
    name = pp.Word(pp.alphas + "_", pp.alphanums + "_")

    expr = pp.Forward()
    call = name + lpar + expr + rpar
    call.set_parse_action(_call)
    symbol = name.copy().set_parse_action(lambda t: Symbol(t[0]))
    paren = lpar + expr + rpar
    atom = number | call | symbol | paren

    powered = atom + pp.Optional(pp.Suppress("^") + integer)
    powered.set_parse_action(
        lambda t: power(t[0], t[1]) if len(t) == 2 else t[0])
    factor = pp.Forward()
    negated = pp.Suppress("-") + factor
    negated.set_parse_action(lambda t: neg(t[0]))
    factor <<= negated | powered
    term = factor + pp.ZeroOrMore(pp.one_of("* /") + factor)
    term.set_parse_action(_fold_product)
    expr <<= term + pp.ZeroOrMore(pp.one_of("+ -") + term)
    expr.set_parse_action(_fold_sum)
    return expr


_GRAMMAR = _build_grammar()


def parse(source: str, allowed_vars: Iterable[str]) -> Expr:
    """
    Parse source text into its canonical expression.

    :param source: Expression text
    :param allowed_vars: Names that may appear as variables
    :return: Canonical Expr
    """
    if source is None or not source.strip():
        raise MalformedExpression("Empty expression.")
    try:
        e = _GRAMMAR.parse_string(source, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise MalformedExpression(
            f"Cannot parse '{source}': {e.msg} (col {e.col})") from e
    except EvaluationSingularity as e:
        raise MalformedExpression(f"Cannot parse '{source}': {e}") from e
    unknown = e.free_symbols - frozenset(allowed_vars)
    if unknown:
        raise UnknownVariable(
            f"Unknown variable(s) {', '.join(sorted(unknown))} in '{source}'.")
    return e


# PRINTING---------------------------------------------------------------------

def _fmt_number(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _fmt_base(b: Expr) -> str:
    if isinstance(b, Symbol):
        return b.name
    if isinstance(b, Func):
        return f"{b.name}({render(b.arg)})"
    return f"({render(b)})"


def _monomial_parts(m: Expr) -> tuple[list[tuple[str, int]], str]:
    """Numerator factors with exponents and the rendered denominator."""
    pairs = m.factors if isinstance(m, Mul) else ((m, 1),)
    num: list[tuple[str, int]] = []
    den = ""
    for b, n in pairs:
        s = _fmt_base(b)
        if n > 0:
            num.append((s, n))
        else:
            den += f"/{s}" if n == -1 else f"/{s}^{-n}"
    return num, den


def _render_term(m: Expr, c: Fraction, leading: bool) -> str:
    num, den = _monomial_parts(m)
    num_s = "*".join(s if n == 1 else f"{s}^{n}" for s, n in num)
    a = abs(c)
    if a == 1:
        body = (num_s or "1") + den
    else:
        body = _fmt_number(a) + (f"*{num_s}" if num_s else "") + den
    if not leading:
        return (" - " if c < 0 else " + ") + body
    return body if c > 0 else "-" + body


def render(e: Expr) -> str:
    """Print an expression in the grammar accepted by parse()."""
    if isinstance(e, Number):
        return _fmt_number(e.value)
    if isinstance(e, Add):
        out = "".join(_render_term(t, c, i == 0)
                      for i, (t, c) in enumerate(e.terms))
        if e.const != 0:
            out += (" - " if e.const < 0 else " + ") + _fmt_number(abs(e.const))
        return out
    return _render_term(e, Fraction(1), True)


# DIFFERENTIATION--------------------------------------------------------------

def _diff_func(f: Func) -> Expr:
    """Derivative of the outer function at its argument."""
    u = f.arg
    match f.name:
        case "sin":
            return cos(u)
        case "cos":
            return neg(sin(u))
        case "tan":
            return add(ONE, power(f, 2))
        case "exp":
            return f
        case "log":
            return power(u, -1)
        case "sqrt":
            return mul(HALF, power(f, -1))
        case "sinh":
            return func("cosh", u)
        case "cosh":
            return func("sinh", u)
    raise UnknownVariable(f"Unknown function '{f.name}'.")  # pragma no cover


def _diff(e: Expr, v: str, memo: dict[int, Expr]) -> Expr:
    if v not in e.free_symbols:
        return ZERO
    if id(e) in memo:
        return memo[id(e)]
    if isinstance(e, Symbol):
        res = ONE
    elif isinstance(e, Add):
        res = add(*(mul(c, _diff(t, v, memo)) for t, c in e.terms))
    elif isinstance(e, Mul):
        parts = []
        for i, (b, n) in enumerate(e.factors):
            db = _diff(b, v, memo)
            if db.is_literal_zero():
                continue
            others = [(bj, nj) for j, (bj, nj) in enumerate(e.factors)
                      if j != i]
            parts.append(_product([(Number(Fraction(n)), 1), (b, n - 1),
                                   (db, 1)] + others))
        res = add(*parts)
    else:
        res = mul(_diff_func(e), _diff(e.arg, v, memo))
    memo[id(e)] = res
    return res


def differentiate(e: Expr, v: str,
                  allowed_vars: Iterable[str] | None = None) -> Expr:
    """
    Exact partial derivative.

    :param e: Expression
    :param v: Variable name
    :param allowed_vars: [optional] Registered names, v must be among them
    :return: Canonical derivative
    """
    if allowed_vars is not None and v not in set(allowed_vars):
        raise UnknownVariable(f"Cannot differentiate by unknown variable "
                              f"'{v}'.")
    return _diff(e, v, {})


# SUBSTITUTION-----------------------------------------------------------------

def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneously replace variables by expressions."""
    keys = frozenset(mapping)
    memo: dict[int, Expr] = {}

    def sub(x: Expr) -> Expr:
        if not (x.free_symbols & keys):
            return x
        if id(x) in memo:
            return memo[id(x)]
        if isinstance(x, Symbol):
            res = as_expr(mapping[x.name])
        elif isinstance(x, Add):
            res = add(x.const, *(mul(c, sub(t)) for t, c in x.terms))
        elif isinstance(x, Mul):
            res = _product((sub(b), n) for b, n in x.factors)
        else:
            res = func(x.name, sub(x.arg))
        memo[id(x)] = res
        return res

    return sub(e)


# SIMPLIFICATION---------------------------------------------------------------

def _terms_of(e: Expr) -> list[tuple[Expr, Fraction]]:
    if isinstance(e, Number):
        return [(ONE, e.value)] if e.value != 0 else []
    if isinstance(e, Add):
        out = list(e.terms)
        if e.const != 0:
            out.append((ONE, e.const))
        return out
    return [(e, Fraction(1))]


def _distribute(acc: dict[Expr, Fraction],
                terms: list[tuple[Expr, Fraction]]) -> dict[Expr, Fraction]:
    out: dict[Expr, Fraction] = {}
    for m1, c1 in acc.items():
        for m2, c2 in terms:
            for m, c in _terms_of(mul(m1, m2)):
                out[m] = out.get(m, Fraction(0)) + c1 * c2 * c
    return out


def simplify(e: Expr) -> Expr:
    """
    Expand products over sums and collect like terms.

    Idempotent and value preserving; cancellations inside rational
    functions that need a common denominator are left to is_zero().
    """
    memo: dict[int, Expr] = {}

    def expand(x: Expr) -> Expr:
        if isinstance(x, (Number, Symbol)):
            return x
        if id(x) in memo:
            return memo[id(x)]
        if isinstance(x, Func):
            res = func(x.name, expand(x.arg))
        elif isinstance(x, Add):
            res = add(x.const, *(mul(c, expand(t)) for t, c in x.terms))
        else:
            acc: dict[Expr, Fraction] = {ONE: Fraction(1)}
            for b, n in x.factors:
                be = expand(b)
                if n > 0 and isinstance(be, Add):
                    for _ in range(n):
                        acc = _distribute(acc, _terms_of(be))
                else:
                    acc = _distribute(acc, _terms_of(power(be, n)))
            constant = acc.pop(ONE, Fraction(0))
            res = _build_add(constant, acc)
        memo[id(x)] = res
        return res

    return expand(e)


# EVALUATION-------------------------------------------------------------------

class _Evaluator:
    """Evaluates one expression at one point, tracking the largest subterm."""

    def __init__(self, point: Mapping[str, float]) -> None:
        self.point = point
        self.memo: dict[int, float] = {}
        self.scale = 0.0

    def value(self, e: Expr) -> float:
        if id(e) in self.memo:
            return self.memo[id(e)]
        try:
            res = self._value(e)
        except OverflowError as err:
            raise EvaluationSingularity(f"Overflow in {render(e)}.") from err
        if not math.isfinite(res):
            raise EvaluationSingularity(f"Non-finite value of {render(e)}.")
        self.scale = max(self.scale, abs(res))
        self.memo[id(e)] = res
        return res

    def _value(self, e: Expr) -> float:
        if isinstance(e, Number):
            return float(e.value)
        if isinstance(e, Symbol):
            try:
                return float(self.point[e.name])
            except KeyError as err:
                raise UnboundVariable(
                    f"No value for variable '{e.name}'.") from err
        if isinstance(e, Add):
            return float(e.const) + sum(float(c) * self.value(t)
                                        for t, c in e.terms)
        if isinstance(e, Mul):
            res = 1.0
            for b, n in e.factors:
                bv = self.value(b)
                if bv == 0.0 and n < 0:
                    raise EvaluationSingularity(
                        f"Division by zero in {render(e)}.")
                res *= bv ** n
            return res
        u = self.value(e.arg)
        match e.name:
            case "log":
                if u <= 0.0:
                    raise EvaluationSingularity(f"log of {u}.")
                return math.log(u)
            case "sqrt":
                if u < 0.0:
                    raise EvaluationSingularity(f"sqrt of {u}.")
                return math.sqrt(u)
            case "tan":
                if math.cos(u) == 0.0:  # pragma no cover
                    raise EvaluationSingularity(f"tan at {u}.")
                return math.tan(u)
        return getattr(math, e.name)(u)


def evaluate(e: Expr, p: Mapping[str, float]) -> float:
    """
    IEEE double evaluation.

    :param e: Expression
    :param p: Point assigning every free variable of e
    :return: Value of e at p
    """
    return _Evaluator(p).value(e)


def evaluate_scaled(e: Expr, p: Mapping[str, float]) -> tuple[float, float]:
    """Evaluate and also return the largest absolute subterm value."""
    ev = _Evaluator(p)
    res = ev.value(e)
    return res, ev.scale


# ZERO EQUIVALENCE-------------------------------------------------------------

@dataclass(frozen=True)
class SampleBox:
    """
    Ranges to draw sample points from. Names without an explicit range are
    classified by the default naming scheme: fibre names (FIBER_PREFIX) in
    FIBER_BOX, the default time name in TIME_BOX, anything else in
    `default`.
    """

    ranges: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    fixed: Mapping[str, float] = field(default_factory=dict)
    default: tuple[float, float] = config.SPACE_BOX

    def range_of(self, name: str) -> tuple[float, float]:
        if name in self.ranges:
            return self.ranges[name]
        if name.startswith(config.FIBER_PREFIX):
            return config.FIBER_BOX
        if name == config.TIME_NAME:
            return config.TIME_BOX
        return self.default

    def draw(self, names: Iterable[str], rng: np.random.Generator) -> Point:
        p: Point = dict(self.fixed)
        for name in names:
            if name in p:
                continue
            lo, hi = self.range_of(name)
            p[name] = float(rng.uniform(lo, hi))
        return p


@dataclass(frozen=True)
class ZeroCheck:
    """Outcome of a zero-equivalence test."""

    verdict: bool
    path: str
    max_residual: float
    samples: int
    seed: int

    def __bool__(self) -> bool:
        return self.verdict


def sample_points(names: Iterable[str], trials: int, seed: int,
                  box: SampleBox | None = None) -> list[Point]:
    """Deterministic sample points for the given variables."""
    box = box if box is not None else SampleBox()
    rng = np.random.default_rng(seed)
    names = sorted(names)
    return [box.draw(names, rng) for _ in range(trials)]


def check_zero(e: Expr, trials: int | None = None, seed: int | None = None,
               box: SampleBox | None = None,
               tol: float | None = None) -> ZeroCheck:
    """
    Decide whether e vanishes identically.

    A literal 0 after simplify() decides symbolically. Otherwise e is
    evaluated at deterministic sample points; a point with a singularity
    is redrawn up to config.MAX_RESAMPLES times. The recorded residual is
    |e(p)| / (1 + scale) with scale the largest absolute subterm value.

    :param e: Expression
    :param trials: Number of sample points
    :param seed: Seed of the point generator
    :param box: Sample box
    :param tol: Tolerance on the normalized residual
    :return: ZeroCheck
    """
    trials = config.DEFAULT_SAMPLES if trials is None else trials
    seed = config.DEFAULT_SEED if seed is None else seed
    tol = config.TOLERANCE if tol is None else tol
    if trials < 1:
        raise InputError("At least one trial is required.")
    s = simplify(e)
    if s.is_literal_zero():
        return ZeroCheck(True, "symbolic", 0.0, 0, seed)
    if isinstance(s, Number):
        return ZeroCheck(False, "symbolic", abs(float(s.value)), 0, seed)
    box = box if box is not None else SampleBox()
    rng = np.random.default_rng(seed)
    names = sorted(e.free_symbols)
    worst = 0.0
    for i in range(trials):
        for _ in range(config.MAX_RESAMPLES + 1):
            p = box.draw(names, rng)
            try:
                value, scale = evaluate_scaled(e, p)
                break
            except EvaluationSingularity as err:
                log.debug(f"Resampling point {i}: {err}")
        else:
            raise SampleExhausted(
                f"No regular sample point found after "
                f"{config.MAX_RESAMPLES} resamples.")
        residual = abs(value) / (1.0 + scale)
        worst = max(worst, residual)
        if residual > tol:
            return ZeroCheck(False, "numeric", worst, i + 1, seed)
    return ZeroCheck(True, "numeric", worst, trials, seed)


def is_zero(e: Expr, trials: int | None = None, seed: int | None = None,
            box: SampleBox | None = None, tol: float | None = None) -> bool:
    """True iff e is identically zero (see check_zero)."""
    return check_zero(e, trials, seed, box, tol).verdict
